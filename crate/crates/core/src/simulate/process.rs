//! Random designs and random functions for simulation studies.

use crate::error::{Error, Result};
use crate::fda::Evaluator;
use crate::geometry::{DesignSample, Domain, SamplingMeasure};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::{PI, SQRT_2};

/// `M` i.i.d. points on `[0, 1]` with density `1 − b/2 + bt`.
pub fn gen_design<R: Rng + ?Sized>(m: usize, b: f64, rng: &mut R) -> Result<DesignSample> {
    let measure = SamplingMeasure::linear(b)?;
    DesignSample::draw(Domain::cube(1)?, measure, m, rng)
}

fn normals<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Process1DConfig {
    /// Eigenvalue decay `λ_k = ((k − ½)π)^{−ν}`.
    pub nu: f64,
    pub terms: usize,
}

impl Process1DConfig {
    pub fn new(nu: f64) -> Self {
        Self { nu, terms: 50 }
    }

    pub fn with_terms(mut self, k: usize) -> Self {
        self.terms = k;
        self
    }
}

/// `Σ_k ξ_k √2 sin((k − ½)πt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KlPath {
    pub scores: Vec<f64>,
}

/// `√2 sin((k − ½)πt)` for `k = 1..=n`, by the three-term recurrence.
fn sine_basis(n: usize, t: f64, out: &mut Vec<f64>) {
    out.clear();
    let h = PI * t;
    let c = 2.0 * h.cos();
    let mut prev = -(0.5 * h).sin();
    let mut cur = (0.5 * h).sin();
    for _ in 0..n {
        out.push(SQRT_2 * cur);
        let next = c * cur - prev;
        prev = cur;
        cur = next;
    }
}

impl KlPath {
    pub fn eval_at(&self, t: f64) -> f64 {
        let mut e = Vec::with_capacity(self.scores.len());
        sine_basis(self.scores.len(), t, &mut e);
        e.iter().zip(&self.scores).map(|(e, s)| e * s).sum()
    }

    pub fn values(&self, sample: &DesignSample) -> Vec<f64> {
        let mut e = Vec::with_capacity(self.scores.len());
        sample
            .coords()
            .iter()
            .map(|&t| {
                sine_basis(self.scores.len(), t, &mut e);
                e.iter().zip(&self.scores).map(|(e, s)| e * s).sum()
            })
            .collect()
    }
}

impl Evaluator for KlPath {
    fn eval(&self, t: &[f64]) -> f64 {
        self.eval_at(t[0])
    }
}

pub fn gen_path_1d<R: Rng + ?Sized>(cfg: &Process1DConfig, rng: &mut R) -> Result<KlPath> {
    if !(cfg.nu > 0.0) || cfg.terms == 0 {
        return Err(Error::InvalidParameter(format!("invalid path config {cfg:?}")));
    }
    let z = normals(cfg.terms, rng);
    let scores = z
        .iter()
        .enumerate()
        .map(|(k, z)| z * ((k as f64 + 0.5) * PI).powf(-cfg.nu / 2.0))
        .collect();
    Ok(KlPath { scores })
}

/// Slope `α(t) = Σ_k 4(−1)^{k+1} k^{−p} √2 sin((k − ½)πt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFunction {
    pub coefficients: Vec<f64>,
}

pub fn slope_alpha(p: f64, terms: usize) -> Result<SlopeFunction> {
    if !(p > 0.5) || terms == 0 {
        return Err(Error::InvalidParameter(format!("slope needs p > 1/2 and K >= 1, got p = {p}, K = {terms}")));
    }
    let coefficients = (1..=terms)
        .map(|k| {
            let sign = if k % 2 == 1 { 4.0 } else { -4.0 };
            sign * (k as f64).powf(-p)
        })
        .collect();
    Ok(SlopeFunction { coefficients })
}

impl SlopeFunction {
    pub fn eval_at(&self, t: f64) -> f64 {
        KlPath {
            scores: self.coefficients.clone(),
        }
        .eval_at(t)
    }

    /// `⟨α, X⟩` from the path scores.
    pub fn inner(&self, path: &KlPath) -> f64 {
        self.coefficients.iter().zip(&path.scores).map(|(a, s)| a * s).sum()
    }
}

impl Evaluator for SlopeFunction {
    fn eval(&self, t: &[f64]) -> f64 {
        let mut e = Vec::with_capacity(self.coefficients.len());
        sine_basis(self.coefficients.len(), t[0], &mut e);
        e.iter().zip(&self.coefficients).map(|(e, a)| e * a).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Process2DConfig {
    pub gamma1: f64,
    pub gamma2: f64,
    pub terms1: usize,
    pub terms2: usize,
}

impl Process2DConfig {
    pub fn new(gamma: f64) -> Self {
        Self {
            gamma1: gamma,
            gamma2: gamma,
            terms1: 12,
            terms2: 12,
        }
    }
}

/// `Σ ω_{k₁k₂} √2cos(k₁πt₁)(k₁π)^{−γ₁} √2cos(k₂πt₂)(k₂π)^{−γ₂}` on the unit square.
#[derive(Debug, Clone, PartialEq)]
pub struct Surface {
    cfg: Process2DConfig,
    /// Row-major `K₁ × K₂`.
    omega: Vec<f64>,
}

fn cos_factors(k: usize, gamma: f64, t: f64) -> Vec<f64> {
    (1..=k)
        .map(|j| {
            let a = j as f64 * PI;
            SQRT_2 * (a * t).cos() * a.powf(-gamma)
        })
        .collect()
}

impl Surface {
    pub fn eval_at(&self, t: &[f64]) -> f64 {
        let c1 = cos_factors(self.cfg.terms1, self.cfg.gamma1, t[0]);
        let c2 = cos_factors(self.cfg.terms2, self.cfg.gamma2, t[1]);
        let mut s = 0.0;
        for (i, a) in c1.iter().enumerate() {
            let row = &self.omega[i * self.cfg.terms2..(i + 1) * self.cfg.terms2];
            s += a * row.iter().zip(&c2).map(|(w, b)| w * b).sum::<f64>();
        }
        s
    }

    pub fn values(&self, sample: &DesignSample) -> Vec<f64> {
        sample.points().map(|p| self.eval_at(p)).collect()
    }

    /// Score `ξ_{jj}` on the eigenfunction `2cos(jπt₁)cos(jπt₂)`, `j ≥ 1`.
    pub fn diagonal_score(&self, j: usize) -> f64 {
        assert!(j >= 1 && j <= self.cfg.terms1.min(self.cfg.terms2));
        let a = j as f64 * PI;
        self.omega[(j - 1) * self.cfg.terms2 + (j - 1)] * a.powf(-self.cfg.gamma1) * a.powf(-self.cfg.gamma2)
    }
}

impl Evaluator for Surface {
    fn eval(&self, t: &[f64]) -> f64 {
        self.eval_at(t)
    }
}

/// Eigenfunction `2cos(jπt₁)cos(jπt₂)`.
pub fn diagonal_eigenfunction(j: usize) -> impl Fn(&[f64]) -> f64 + Send + Sync + Clone {
    move |t: &[f64]| {
        let a = j as f64 * PI;
        2.0 * (a * t[0]).cos() * (a * t[1]).cos()
    }
}

pub fn gen_surface_2d<R: Rng + ?Sized>(cfg: &Process2DConfig, rng: &mut R) -> Result<Surface> {
    if !(cfg.gamma1 > 0.5 && cfg.gamma2 > 0.5) || cfg.terms1 == 0 || cfg.terms2 == 0 {
        return Err(Error::InvalidParameter(format!("invalid surface config {cfg:?}")));
    }
    Ok(Surface {
        cfg: *cfg,
        omega: normals(cfg.terms1 * cfg.terms2, rng),
    })
}

/// Riemann zeta for `s > 1`, partial sum plus Euler–Maclaurin tail.
pub fn zeta(s: f64) -> f64 {
    assert!(s > 1.0);
    let n = 64usize;
    let nf = n as f64;
    let head: f64 = (1..n).map(|k| (k as f64).powf(-s)).sum();
    let tail = nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s) + s * nf.powf(-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * nf.powf(-s - 3.0) / 720.0;
    head + tail
}

/// Share of the variance of a `γ`-surface carried by `K₁ = K₂ = K` terms,
/// relative to the untruncated expansion.
pub fn explained_variance(gamma: f64, k: usize) -> f64 {
    let s = 2.0 * gamma;
    let part: f64 = (1..=k).map(|j| (j as f64).powf(-s)).sum();
    (part / zeta(s)).powi(2)
}

/// Fractional Brownian motion with Hurst index `h` at the given times.
pub fn gen_fbm<R: Rng + ?Sized>(h: f64, times: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::InvalidParameter(format!("Hurst index {h} outside (0, 1)")));
    }
    let n = times.len();
    let two_h = 2.0 * h;
    let cov = DMatrix::from_fn(n, n, |i, j| {
        let (s, t) = (times[i].abs(), times[j].abs());
        0.5 * (s.powf(two_h) + t.powf(two_h) - (times[i] - times[j]).abs().powf(two_h))
    });
    let mut jitter = 0.0;
    for _ in 0..6 {
        let m = &cov + DMatrix::identity(n, n) * jitter;
        if let Some(chol) = m.cholesky() {
            let z = DVector::from_vec(normals(n, rng));
            return Ok((chol.l() * z).iter().copied().collect());
        }
        jitter = if jitter == 0.0 { 1e-12 } else { jitter * 100.0 };
    }
    Err(Error::Numerical("fBM covariance is not positive definite".into()))
}

/// `value_m + σ_m η_m` with standard normal `η`.
pub fn add_noise<R: Rng + ?Sized>(values: &[f64], sigma: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    if values.len() != sigma.len() {
        return Err(Error::LengthMismatch {
            expected: values.len(),
            got: sigma.len(),
        });
    }
    if let Some(index) = sigma.iter().position(|s| !(*s >= 0.0)) {
        return Err(Error::NonFiniteValue { index });
    }
    Ok(values
        .iter()
        .zip(sigma)
        .map(|(v, s)| v + s * rng.sample::<f64, _>(StandardNormal))
        .collect())
}

/// `ln|err_nn| − ln|err_competitor|`; `None` when either error is zero.
pub fn log_ratio_risk(err_competitor: f64, err_nn: f64) -> Option<f64> {
    let r = err_nn.abs().ln() - err_competitor.abs().ln();
    r.is_finite().then_some(r)
}
