//! Integrated functional depth `∫ D(X(t); P_t) Ω(t) dt`.

use super::{check_len, design_density, SharedEvaluator};
use crate::error::Result;
use crate::geometry::DesignSample;
use crate::infer::{subsample_pi, IntervalEstimate, SubsampleConfig};
use crate::integrate::{IntegrandEvaluations, Rule};
use crate::weights::{WeightOptions, WeightSet};
use statrs::distribution::{ContinuousCDF, Normal};

/// Hölder exponent used for depth intervals of differentiable paths.
pub const DEPTH_BETA: f64 = 1.0;

/// Marginal law of `X(t)`.
#[derive(Clone, Debug)]
pub enum Marginal {
    Gaussian { mean: SharedEvaluator, sd: SharedEvaluator },
    /// Empirical law of reference curves evaluated at `t`.
    Empirical(Vec<SharedEvaluator>),
}

impl Marginal {
    pub fn cdf(&self, t: &[f64], x: f64) -> f64 {
        match self {
            Marginal::Gaussian { mean, sd } => {
                let s = sd.eval(t);
                let z = (x - mean.eval(t)) / s;
                if s > 0.0 {
                    Normal::standard().cdf(z)
                } else if x >= mean.eval(t) {
                    1.0
                } else {
                    0.0
                }
            }
            Marginal::Empirical(curves) => {
                let below = curves.iter().filter(|c| c.eval(t) <= x).count();
                below as f64 / curves.len() as f64
            }
        }
    }
}

/// Univariate Tukey depth in terms of the CDF value.
pub fn tukey_depth(u: f64) -> f64 {
    u.min(1.0 - u)
}

#[derive(Clone, Debug)]
pub struct DepthSpec {
    pub marginal: Marginal,
    /// Pointwise depth as a function of `F_t(x)`.
    pub depth: fn(f64) -> f64,
    /// Weight `Ω`; `None` takes the design density, making `Ω/f_T ≡ 1`.
    pub weight: Option<SharedEvaluator>,
}

impl DepthSpec {
    pub fn tukey(marginal: Marginal) -> Self {
        Self {
            marginal,
            depth: tukey_depth,
            weight: None,
        }
    }

    pub fn integrand(&self, values: &[f64], sample: &DesignSample) -> Result<IntegrandEvaluations> {
        check_len(sample.len(), values.len())?;
        let v = match &self.weight {
            None => sample
                .points()
                .zip(values)
                .map(|(p, &x)| (self.depth)(self.marginal.cdf(p, x)))
                .collect(),
            Some(omega) => {
                let f = design_density(sample)?;
                sample
                    .points()
                    .enumerate()
                    .map(|(m, p)| (self.depth)(self.marginal.cdf(p, values[m])) * omega.eval(p) / f[m])
                    .collect()
            }
        };
        IntegrandEvaluations::new(sample.clone(), v)
    }
}

pub fn depth_mfd(spec: &DepthSpec, values: &[f64], sample: &DesignSample, w: &WeightSet) -> Result<f64> {
    w.dot(&spec.integrand(values, sample)?.values)
}

pub fn depth_mfd_pi(
    spec: &DepthSpec,
    values: &[f64],
    sample: &DesignSample,
    rule: Rule,
    cfg: &SubsampleConfig,
    delta: f64,
    opts: &WeightOptions,
) -> Result<IntervalEstimate> {
    subsample_pi(&spec.integrand(values, sample)?, rule, cfg, delta, opts)
}
