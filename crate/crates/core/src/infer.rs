//! Prediction and confidence intervals.
//!
//! Noiseless integrands get a subsampling prediction interval whose scaling
//! follows the estimator's error rate. Noisy integrands get a Gaussian
//! interval for the control-neighbor estimate with variance `Σ w_m² σ_m²` or
//! its large-`M` limit on the interval.

use crate::error::{Error, Result};
use crate::integrate::{IntegrandEvaluations, Rule};
use crate::parallel::try_map_indexed;
use crate::rng::{stream, Role};
use crate::weights::{WeightOptions, WeightSet};
use log::warn;
use rand::seq::index;
use statrs::distribution::{ContinuousCDF, Normal};

/// Asymptotic `M Σ w_m²` of the unbiased weights on `[0, 1]`.
pub const LIMIT_VARIANCE_CONSTANT: f64 = 2.5;

pub const DEFAULT_REPLICATES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalMethod {
    SubsamplePi,
    CltCiConditional,
    CltCiLimit,
    /// Sample-mean interval with the empirical variance.
    CltMean,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IntervalMeta {
    pub replicates: Option<usize>,
    pub m_star: Option<usize>,
    pub beta: Option<f64>,
    pub rate: Option<f64>,
    pub s_m: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalEstimate {
    pub point: f64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub method: IntervalMethod,
    pub meta: IntervalMeta,
}

impl IntervalEstimate {
    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    /// Shift all three values by `c`.
    pub fn shifted(mut self, c: f64) -> Self {
        self.point += c;
        self.lower += c;
        self.upper += c;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsampleConfig {
    /// Number of subsamples `B`.
    pub replicates: usize,
    /// Subsample size `M*`; `None` means `⌊M/2⌋`.
    pub m_star: Option<usize>,
    pub beta: f64,
    pub seed: u64,
    /// Extra stream key, so that a harness can reuse one seed across replications.
    pub replication: u64,
}

impl SubsampleConfig {
    pub fn new(beta: f64, seed: u64) -> Self {
        Self {
            replicates: DEFAULT_REPLICATES,
            m_star: None,
            beta,
            seed,
            replication: 0,
        }
    }

    pub fn with_replicates(mut self, b: usize) -> Self {
        self.replicates = b;
        self
    }

    pub fn with_m_star(mut self, m_star: usize) -> Self {
        self.m_star = Some(m_star);
        self
    }

    pub fn with_replication(mut self, rep: u64) -> Self {
        self.replication = rep;
        self
    }

    pub fn resolve_m_star(&self, m: usize) -> usize {
        self.m_star.unwrap_or(m / 2)
    }

    fn validate(&self, m: usize, rule: Rule) -> Result<usize> {
        if self.replicates < 2 {
            return Err(Error::InvalidSubsample(format!("B = {} < 2", self.replicates)));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidSubsample(format!("beta = {} must be positive", self.beta)));
        }
        if self.beta > 1.0 {
            warn!("beta = {} exceeds the Hölder range (0, 1]", self.beta);
        }
        let m_star = self.resolve_m_star(m);
        if m_star >= m {
            return Err(Error::InvalidSubsample(format!("M* = {m_star} must be below M = {m}")));
        }
        let min = if rule.is_control() { 2 } else { 1 };
        if m_star < min {
            return Err(Error::InvalidSubsample(format!("M* = {m_star} is below {min}")));
        }
        Ok(m_star)
    }
}

fn check_level(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidProbability(delta))
    }
}

/// Type-7 empirical quantile: linear interpolation at `h = (n − 1)p + 1`.
pub fn empirical_quantile(sample: &[f64], p: f64) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::Empty);
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(quantile_sorted(&sorted, p))
}

fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Subsampling prediction interval at level `1 − δ` around `rule`'s estimate.
///
/// Each subsample `b` draws `M*` indices without replacement from its own
/// stream, so the result does not depend on scheduling.
pub fn subsample_pi(
    ev: &IntegrandEvaluations,
    rule: Rule,
    cfg: &SubsampleConfig,
    delta: f64,
    opts: &WeightOptions,
) -> Result<IntervalEstimate> {
    check_level(delta)?;
    let m = ev.len();
    let m_star = cfg.validate(m, rule)?;
    if ev.is_noisy() {
        warn!("subsampling interval on noisy evaluations");
    }
    let point = rule.estimate(ev, opts)?;
    let rate = rule.rate_exponent(cfg.beta, ev.dim());
    let scale_star = (m_star as f64).powf(rate);
    let mut d = try_map_indexed(cfg.replicates, |b| {
        let mut r = stream(cfg.seed, cfg.replication, Role::Subsample, b as u64);
        let mut idx = index::sample(&mut r, m, m_star).into_vec();
        idx.sort_unstable();
        let est = rule.estimate(&ev.subset(&idx), opts)?;
        Ok::<_, Error>(scale_star * (est - point))
    })?;
    d.sort_by(f64::total_cmp);
    let scale = (m as f64).powf(-rate);
    Ok(IntervalEstimate {
        point,
        lower: point + scale * quantile_sorted(&d, delta / 2.0),
        upper: point + scale * quantile_sorted(&d, 1.0 - delta / 2.0),
        level: 1.0 - delta,
        method: IntervalMethod::SubsamplePi,
        meta: IntervalMeta {
            replicates: Some(cfg.replicates),
            m_star: Some(m_star),
            beta: Some(cfg.beta),
            rate: Some(rate),
            s_m: None,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CltMode {
    Conditional,
    Limit1d,
}

/// Standard normal quantile.
pub fn normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

fn gaussian(point: f64, s: f64, delta: f64, method: IntervalMethod) -> IntervalEstimate {
    let half = normal_quantile(1.0 - delta / 2.0) * s;
    IntervalEstimate {
        point,
        lower: point - half,
        upper: point + half,
        level: 1.0 - delta,
        method,
        meta: IntervalMeta {
            s_m: Some(s),
            ..Default::default()
        },
    }
}

/// Gaussian confidence interval for the control-neighbor estimate of a noisy integrand.
pub fn clt_ci(ev: &IntegrandEvaluations, w: &WeightSet, delta: f64, mode: CltMode) -> Result<IntervalEstimate> {
    check_level(delta)?;
    let sigma = ev.noise_scale.as_ref().ok_or(Error::MissingNoiseScale)?;
    if w.len() != ev.len() {
        return Err(Error::LengthMismatch {
            expected: ev.len(),
            got: w.len(),
        });
    }
    let point = w.dot(&ev.values)?;
    let sphere = ev.sample.domain().is_sphere();
    let (s2, method) = match mode {
        CltMode::Conditional => {
            if sphere {
                warn!("Gaussian limit on the sphere is conjectural");
            }
            let s2: f64 = w.weights.iter().zip(sigma).map(|(w, s)| w * w * s * s).sum();
            (s2, IntervalMethod::CltCiConditional)
        }
        CltMode::Limit1d => {
            if ev.dim() != 1 || sphere {
                return Err(Error::LimitModeDimension);
            }
            let m = ev.len() as f64;
            let mean_s2 = sigma.iter().map(|s| s * s).sum::<f64>() / m;
            (LIMIT_VARIANCE_CONSTANT * mean_s2 / m, IntervalMethod::CltCiLimit)
        }
    };
    Ok(gaussian(point, s2.sqrt(), delta, method))
}

/// Sample-mean interval `x̄ ± z s/√M` with the empirical standard deviation.
pub fn clt_mean_interval(ev: &IntegrandEvaluations, delta: f64) -> Result<IntervalEstimate> {
    check_level(delta)?;
    let m = ev.len();
    if m < 2 {
        return Err(Error::InsufficientPoints { needed: 2, got: m });
    }
    let mf = m as f64;
    let mean = ev.values.iter().sum::<f64>() / mf;
    let var = ev.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (mf - 1.0);
    Ok(gaussian(mean, (var / mf).sqrt(), delta, IntervalMethod::CltMean))
}
