//! Prediction in the functional linear model `Y = α₀ + ⟨α, X⟩ + ε`.

use super::{check_len, design_density, SharedEvaluator};
use crate::error::{Error, Result};
use crate::geometry::DesignSample;
use crate::infer::{clt_ci, subsample_pi, CltMode, IntervalEstimate, SubsampleConfig};
use crate::integrate::{IntegrandEvaluations, Rule};
use crate::weights::{WeightOptions, WeightSet};
use std::sync::Arc;

/// Monotone link of a generalized functional linear model.
#[derive(Clone)]
pub enum Link {
    Identity,
    Logit,
    Exp,
    Custom {
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        increasing: bool,
    },
}

impl Link {
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            Link::Identity => x,
            Link::Logit => 1.0 / (1.0 + (-x).exp()),
            Link::Exp => x.exp(),
            Link::Custom { f, .. } => f(x),
        }
    }

    pub fn is_increasing(&self) -> bool {
        match self {
            Link::Custom { increasing, .. } => *increasing,
            _ => true,
        }
    }
}

impl std::fmt::Debug for Link {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Link::Identity => f.write_str("Identity"),
            Link::Logit => f.write_str("Logit"),
            Link::Exp => f.write_str("Exp"),
            Link::Custom { increasing, .. } => write!(f, "Custom {{ increasing: {increasing} }}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RegressionModel {
    pub alpha0: f64,
    /// Slope components `α_1, …, α_K`.
    pub alpha: Vec<SharedEvaluator>,
    pub link: Option<Link>,
}

impl RegressionModel {
    pub fn new(alpha0: f64, alpha: Vec<SharedEvaluator>) -> Self {
        Self {
            alpha0,
            alpha,
            link: None,
        }
    }

    pub fn scalar(alpha0: f64, alpha: SharedEvaluator) -> Self {
        Self::new(alpha0, vec![alpha])
    }

    pub fn with_link(mut self, link: Link) -> Self {
        self.link = Some(link);
        self
    }

    pub fn covariate_dim(&self) -> usize {
        self.alpha.len()
    }

    /// `Σ_k α_k(T_m) X_k(T_m) / f_T(T_m)` at every design point; `covariate[k][m]`.
    pub fn integrand(&self, covariate: &[Vec<f64>], sample: &DesignSample) -> Result<IntegrandEvaluations> {
        check_len(self.alpha.len(), covariate.len())?;
        for c in covariate {
            check_len(sample.len(), c.len())?;
        }
        let f = design_density(sample)?;
        let values = sample
            .points()
            .enumerate()
            .map(|(m, p)| {
                let s: f64 = self.alpha.iter().zip(covariate).map(|(a, x)| a.eval(p) * x[m]).sum();
                s / f[m]
            })
            .collect();
        IntegrandEvaluations::new(sample.clone(), values)
    }
}

/// `α₀ + Σ_m w_m α(T_m)ᵀX(T_m)/f_T(T_m)`.
pub fn predict_flm(model: &RegressionModel, covariate: &[Vec<f64>], sample: &DesignSample, w: &WeightSet) -> Result<f64> {
    let ev = model.integrand(covariate, sample)?;
    Ok(model.alpha0 + w.dot(&ev.values)?)
}

/// Subsampling prediction interval for the noiseless-covariate prediction.
pub fn predict_flm_pi(
    model: &RegressionModel,
    covariate: &[Vec<f64>],
    sample: &DesignSample,
    rule: Rule,
    cfg: &SubsampleConfig,
    delta: f64,
    opts: &WeightOptions,
) -> Result<IntervalEstimate> {
    let ev = model.integrand(covariate, sample)?;
    Ok(subsample_pi(&ev, rule, cfg, delta, opts)?.shifted(model.alpha0))
}

/// Gaussian interval for a scalar covariate observed with noise of scale `sigma`.
#[allow(clippy::too_many_arguments)]
pub fn predict_flm_ci_noisy(
    model: &RegressionModel,
    z: &[f64],
    sigma: &[f64],
    sample: &DesignSample,
    w: &WeightSet,
    delta: f64,
    mode: CltMode,
) -> Result<IntervalEstimate> {
    if model.covariate_dim() != 1 {
        return Err(Error::CovariateDimension(model.covariate_dim()));
    }
    check_len(sample.len(), sigma.len())?;
    let ev = model.integrand(&[z.to_vec()], sample)?;
    let f = design_density(sample)?;
    let scale = sample
        .points()
        .zip(sigma.iter().zip(&f))
        .map(|(p, (s, f))| (model.alpha[0].eval(p) * s / f).abs())
        .collect();
    let ev = ev.with_noise_scale(scale)?;
    Ok(clt_ci(&ev, w, delta, mode)?.shifted(model.alpha0))
}

/// Image of an interval under a monotone link.
pub fn glm_transform_interval(iv: &IntervalEstimate, link: &Link) -> IntervalEstimate {
    let (a, b) = (link.apply(iv.lower), link.apply(iv.upper));
    let (lower, upper) = if link.is_increasing() { (a, b) } else { (b, a) };
    IntervalEstimate {
        point: link.apply(iv.point),
        lower,
        upper,
        ..iv.clone()
    }
}
