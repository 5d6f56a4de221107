//! Replicated experiments with known truth, written as CSV rows.

use super::process::{
    add_noise, diagonal_eigenfunction, gen_design, gen_path_1d, gen_surface_2d, log_ratio_risk, slope_alpha,
    Process1DConfig, Process2DConfig,
};
use crate::error::{Error, Result};
use crate::fda::{FpcaModel, RegressionModel, SharedEvaluator};
use crate::geometry::{DesignSample, Domain, SamplingMeasure};
use crate::infer::{clt_ci, clt_mean_interval, subsample_pi, CltMode, IntervalEstimate, SubsampleConfig};
use crate::integrate::{IntegrandEvaluations, Rule};
use crate::parallel::try_map_indexed;
use crate::rng::{stream, Role};
use crate::weights::{control_weights, WeightOptions, WeightVariant};
use log::warn;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

pub const CSV_HEADER: [&str; 10] = [
    "scenario_id",
    "rep",
    "method",
    "estimate",
    "truth",
    "abs_error",
    "log_ratio_vs_nn",
    "covered",
    "length",
    "seconds",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    /// Control neighbors; subsampling interval when noiseless, conditional CLT when noisy.
    #[serde(rename = "NN")]
    Nn,
    /// Control neighbors with the limiting CLT variance (noisy, `d = 1`).
    #[serde(rename = "NN-lim")]
    NnLimit,
    /// Sample mean with its CLT interval.
    #[serde(rename = "mean")]
    Mean,
    #[serde(rename = "trapez")]
    Trapezoid,
    /// Sample mean with a subsampling interval.
    #[serde(rename = "ms")]
    MeanSubsample,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Nn => "NN",
            Method::NnLimit => "NN-lim",
            Method::Mean => "mean",
            Method::Trapezoid => "trapez",
            Method::MeanSubsample => "ms",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    /// Scalar-on-function prediction with KL paths on `[0, 1]`.
    Regression,
    /// Diagonal fPCA score of a random surface on the unit square.
    Surface,
}

fn default_reps() -> usize {
    500
}
fn default_replicates() -> usize {
    1000
}
fn default_level() -> f64 {
    0.95
}
fn default_methods() -> Vec<Method> {
    vec![Method::Nn, Method::Mean, Method::Trapezoid, Method::MeanSubsample]
}
fn default_p() -> f64 {
    2.0
}
fn default_one() -> usize {
    1
}

/// One experimental cell. Unset process parameters fall back to the
/// conventional choices (`K = 50` paths, `K₁ = K₂ = 12` surfaces).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub id: String,
    pub kind: ScenarioKind,
    pub m: usize,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default)]
    pub nu: Option<f64>,
    #[serde(default)]
    pub b: f64,
    /// Covariate noise level; absent means noiseless.
    #[serde(default)]
    pub sigma: Option<f64>,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub terms: Option<usize>,
    /// Decay of the slope coefficients.
    #[serde(default = "default_p")]
    pub p: f64,
    /// Diagonal score index for surfaces.
    #[serde(default = "default_one")]
    pub score: usize,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    /// Number of subsamples `B`.
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub m_star: Option<usize>,
    #[serde(default = "default_level")]
    pub level: f64,
    /// Hölder exponent for the subsampling scale; derived from `ν` or `γ` if absent.
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    /// Fill the `seconds` column (makes the CSV non-reproducible).
    #[serde(default)]
    pub timing: bool,
}

impl Scenario {
    pub fn regression(id: &str, m: usize, nu: f64, b: f64) -> Self {
        Self {
            id: id.to_string(),
            kind: ScenarioKind::Regression,
            m,
            reps: default_reps(),
            nu: Some(nu),
            b,
            sigma: None,
            gamma: None,
            terms: None,
            p: default_p(),
            score: 1,
            methods: default_methods(),
            replicates: default_replicates(),
            m_star: None,
            level: default_level(),
            beta: None,
            seed: 0,
            timing: false,
        }
    }

    pub fn surface(id: &str, m: usize, gamma: f64) -> Self {
        Self {
            kind: ScenarioKind::Surface,
            nu: None,
            gamma: Some(gamma),
            methods: vec![Method::Nn, Method::MeanSubsample],
            ..Self::regression(id, m, 2.0, 0.0)
        }
    }

    /// `min((ν − 1)/2, 1)` for paths, `min(γ₁, γ₂) − ½` for surfaces.
    pub fn resolved_beta(&self) -> f64 {
        if let Some(b) = self.beta {
            return b;
        }
        match self.kind {
            ScenarioKind::Regression => ((self.nu.unwrap_or(2.0) - 1.0) / 2.0).min(1.0),
            ScenarioKind::Surface => self.gamma.unwrap_or(1.0) - 0.5,
        }
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            ScenarioKind::Regression => 1,
            ScenarioKind::Surface => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(format!("scenario {}: {msg}", self.id)));
        if self.m < 4 {
            return bad(format!("M = {} < 4", self.m));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return bad(format!("level {} outside (0, 1)", self.level));
        }
        if self.replicates < 2 {
            return bad("need at least 2 subsamples".into());
        }
        if self.methods.is_empty() {
            return bad("no methods".into());
        }
        match self.kind {
            ScenarioKind::Regression => {
                if !self.nu.is_some_and(|v| v > 0.0) {
                    return bad("regression needs nu > 0".into());
                }
                SamplingMeasure::linear(self.b)?;
                if self.sigma.is_some_and(|s| !(s >= 0.0)) {
                    return bad("sigma must be non-negative".into());
                }
            }
            ScenarioKind::Surface => {
                if !self.gamma.is_some_and(|g| g > 0.5) {
                    return bad("surface needs gamma > 1/2".into());
                }
                if self.sigma.is_some() {
                    return bad("noisy surfaces are not supported".into());
                }
                if self.score == 0 || self.score > self.terms.unwrap_or(12) {
                    return bad(format!("score index {} out of range", self.score));
                }
            }
        }
        if !(self.resolved_beta() > 0.0) {
            return bad("beta must be positive".into());
        }
        Ok(())
    }

    /// Methods that cannot run in this scenario, with the reason.
    pub fn skipped_methods(&self) -> Vec<(Method, &'static str)> {
        self.methods
            .iter()
            .filter_map(|&m| {
                let why = match m {
                    Method::Trapezoid if self.dim() != 1 => "trapezoid requires univariate domain",
                    Method::NnLimit if self.dim() != 1 => "limit variance requires univariate domain",
                    Method::NnLimit if self.sigma.is_none() => "limit variance requires noisy covariates",
                    _ => return None,
                };
                Some((m, why))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub scenario_id: String,
    pub rep: usize,
    pub method: Method,
    pub estimate: f64,
    pub truth: f64,
    pub abs_error: f64,
    /// `ln|err_NN| − ln|err_method|`; empty when an error is exactly zero.
    pub log_ratio_vs_nn: Option<f64>,
    pub covered: Option<u8>,
    pub length: Option<f64>,
    pub seconds: Option<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentOutput {
    pub records: Vec<ExperimentRecord>,
    pub skipped: Vec<(Method, String)>,
}

struct Replication {
    ev: IntegrandEvaluations,
    truth: f64,
}

fn replicate(sc: &Scenario, rep: usize) -> Result<Replication> {
    let r = rep as u64;
    let mut design_rng = stream(sc.seed, r, Role::Design, 0);
    let mut path_rng = stream(sc.seed, r, Role::Path, 0);
    match sc.kind {
        ScenarioKind::Regression => {
            let terms = sc.terms.unwrap_or(50);
            let sample = gen_design(sc.m, sc.b, &mut design_rng)?;
            let path = gen_path_1d(&Process1DConfig::new(sc.nu.unwrap_or(2.0)).with_terms(terms), &mut path_rng)?;
            let slope = slope_alpha(sc.p, terms)?;
            let truth = slope.inner(&path);
            let clean = path.values(&sample);
            let model = RegressionModel::scalar(0.0, Arc::new(slope));
            let ev = match sc.sigma {
                None => model.integrand(&[clean], &sample)?,
                Some(s) => {
                    let mut noise_rng = stream(sc.seed, r, Role::Noise, 0);
                    let sigma = vec![s; sc.m];
                    let z = add_noise(&clean, &sigma, &mut noise_rng)?;
                    let ev = model.integrand(&[z], &sample)?;
                    let f: Vec<f64> = sample.points().map(|p| sample.measure().density(p)).collect();
                    let scale = sample
                        .points()
                        .zip(&f)
                        .map(|(p, f)| (model.alpha[0].eval(p) * s / f).abs())
                        .collect();
                    ev.with_noise_scale(scale)?
                }
            };
            Ok(Replication { ev, truth })
        }
        ScenarioKind::Surface => {
            let gamma = sc.gamma.unwrap_or(1.0);
            let mut cfg = Process2DConfig::new(gamma);
            if let Some(k) = sc.terms {
                cfg.terms1 = k;
                cfg.terms2 = k;
            }
            let sample = DesignSample::draw(Domain::cube(2)?, SamplingMeasure::Uniform, sc.m, &mut design_rng)?;
            let surface = gen_surface_2d(&cfg, &mut path_rng)?;
            let truth = surface.diagonal_score(sc.score);
            let values = surface.values(&sample);
            let zero: SharedEvaluator = Arc::new(|_: &[f64]| 0.0);
            let model = FpcaModel::new(zero, vec![Arc::new(diagonal_eigenfunction(sc.score))])?;
            Ok(Replication {
                ev: model.integrand(0, &values, &sample)?,
                truth,
            })
        }
    }
}

struct Outcome {
    method: Method,
    estimate: f64,
    interval: Option<IntervalEstimate>,
    seconds: f64,
}

fn run_method(sc: &Scenario, rep: usize, data: &Replication, method: Method) -> Result<Outcome> {
    let start = Instant::now();
    let delta = 1.0 - sc.level;
    let opts = WeightOptions::default();
    let nn_rule = Rule::auto(sc.dim());
    let cfg = SubsampleConfig {
        replicates: sc.replicates,
        m_star: sc.m_star,
        beta: sc.resolved_beta(),
        seed: sc.seed,
        replication: rep as u64,
    };
    let ev = &data.ev;
    let interval = match method {
        Method::Nn | Method::NnLimit if ev.is_noisy() => {
            let w = control_weights(&ev.sample, WeightVariant::default_for_dim(sc.dim()), &opts)?;
            let mode = if method == Method::Nn { CltMode::Conditional } else { CltMode::Limit1d };
            clt_ci(ev, &w, delta, mode)?
        }
        Method::Nn => subsample_pi(ev, nn_rule, &cfg, delta, &opts)?,
        Method::NnLimit => unreachable!("filtered as skipped"),
        Method::Mean => clt_mean_interval(ev, delta)?,
        Method::Trapezoid => subsample_pi(ev, Rule::Trapezoid, &cfg, delta, &opts)?,
        Method::MeanSubsample => subsample_pi(ev, Rule::Mean, &cfg, delta, &opts)?,
    };
    let (estimate, interval) = if ev.is_noisy() && !matches!(method, Method::Nn | Method::NnLimit) {
        let rule = if method == Method::Trapezoid { Rule::Trapezoid } else { Rule::Mean };
        (rule.estimate(ev, &opts)?, None)
    } else {
        (interval.point, Some(interval))
    };
    Ok(Outcome {
        method,
        estimate,
        interval,
        seconds: start.elapsed().as_secs_f64(),
    })
}

fn run_replication(sc: &Scenario, rep: usize, methods: &[Method]) -> Result<Vec<ExperimentRecord>> {
    let data = replicate(sc, rep)?;
    let outcomes = methods
        .iter()
        .map(|&m| run_method(sc, rep, &data, m))
        .collect::<Result<Vec<_>>>()?;
    let nn_error = outcomes
        .iter()
        .find(|o| o.method == Method::Nn)
        .map(|o| o.estimate - data.truth);
    Ok(outcomes
        .into_iter()
        .map(|o| {
            let err = o.estimate - data.truth;
            ExperimentRecord {
                scenario_id: sc.id.clone(),
                rep,
                method: o.method,
                estimate: o.estimate,
                truth: data.truth,
                abs_error: err.abs(),
                log_ratio_vs_nn: nn_error.and_then(|e| log_ratio_risk(err, e)),
                covered: o.interval.as_ref().map(|iv| iv.contains(data.truth) as u8),
                length: o.interval.as_ref().map(IntervalEstimate::length),
                seconds: sc.timing.then_some(o.seconds),
            }
        })
        .collect())
}

/// Run all replications; records come back in replication order, then
/// in the scenario's method order.
pub fn run_experiment(sc: &Scenario) -> Result<ExperimentOutput> {
    sc.validate()?;
    let skipped: Vec<(Method, String)> = sc
        .skipped_methods()
        .into_iter()
        .map(|(m, why)| {
            warn!("scenario {}: skipping {}: {why}", sc.id, m.tag());
            (m, why.to_string())
        })
        .collect();
    let methods: Vec<Method> = sc
        .methods
        .iter()
        .copied()
        .filter(|m| !skipped.iter().any(|(s, _)| s == m))
        .collect();
    let per_rep = try_map_indexed(sc.reps, |rep| run_replication(sc, rep, &methods))?;
    Ok(ExperimentOutput {
        records: per_rep.into_iter().flatten().collect(),
        skipped,
    })
}

pub fn write_csv<W: Write>(records: &[ExperimentRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::Csv(e.to_string()))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub method: Method,
    pub rows: usize,
    pub coverage: Option<f64>,
    pub mean_length: Option<f64>,
    pub median_log_ratio: Option<f64>,
    pub mean_abs_error: f64,
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Per-method coverage, mean length and median log-ratio, in first-seen order.
pub fn summarize(records: &[ExperimentRecord]) -> Vec<MethodSummary> {
    let mut order: Vec<Method> = Vec::new();
    for r in records {
        if !order.contains(&r.method) {
            order.push(r.method);
        }
    }
    order
        .into_iter()
        .map(|method| {
            let rows: Vec<&ExperimentRecord> = records.iter().filter(|r| r.method == method).collect();
            let cov: Vec<f64> = rows.iter().filter_map(|r| r.covered.map(f64::from)).collect();
            let len: Vec<f64> = rows.iter().filter_map(|r| r.length).collect();
            let lr: Vec<f64> = rows.iter().filter_map(|r| r.log_ratio_vs_nn).collect();
            let err: Vec<f64> = rows.iter().map(|r| r.abs_error).collect();
            MethodSummary {
                method,
                rows: rows.len(),
                coverage: mean(&cov),
                mean_length: mean(&len),
                median_log_ratio: median(lr),
                mean_abs_error: mean(&err).unwrap_or(f64::NAN),
            }
        })
        .collect()
}
