//! Functional principal component scores `ξ_j = ⟨X − μ, ψ_j⟩`.

use super::{check_len, design_density, SharedEvaluator};
use crate::error::{Error, Result};
use crate::geometry::DesignSample;
use crate::infer::{clt_ci, subsample_pi, CltMode, IntervalEstimate, SubsampleConfig};
use crate::integrate::{IntegrandEvaluations, Rule};
use crate::weights::{WeightOptions, WeightSet};

#[derive(Clone, Debug)]
pub struct FpcaModel {
    pub mean: SharedEvaluator,
    pub basis: Vec<SharedEvaluator>,
    pub eigenvalues: Option<Vec<f64>>,
}

impl FpcaModel {
    pub fn new(mean: SharedEvaluator, basis: Vec<SharedEvaluator>) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::Empty);
        }
        Ok(Self {
            mean,
            basis,
            eigenvalues: None,
        })
    }

    fn component(&self, j: usize) -> Result<&SharedEvaluator> {
        self.basis
            .get(j)
            .ok_or_else(|| Error::InvalidParameter(format!("component {j} out of range (J = {})", self.basis.len())))
    }

    /// `(X(T_m) − μ(T_m)) ψ_j(T_m) / f_T(T_m)` for the 0-based component `j`.
    pub fn integrand(&self, j: usize, values: &[f64], sample: &DesignSample) -> Result<IntegrandEvaluations> {
        let psi = self.component(j)?;
        check_len(sample.len(), values.len())?;
        let f = design_density(sample)?;
        let v = sample
            .points()
            .enumerate()
            .map(|(m, p)| (values[m] - self.mean.eval(p)) * psi.eval(p) / f[m])
            .collect();
        IntegrandEvaluations::new(sample.clone(), v)
    }
}

pub fn fpca_score(model: &FpcaModel, j: usize, values: &[f64], sample: &DesignSample, w: &WeightSet) -> Result<f64> {
    w.dot(&model.integrand(j, values, sample)?.values)
}

pub fn fpca_score_pi(
    model: &FpcaModel,
    j: usize,
    values: &[f64],
    sample: &DesignSample,
    rule: Rule,
    cfg: &SubsampleConfig,
    delta: f64,
    opts: &WeightOptions,
) -> Result<IntervalEstimate> {
    subsample_pi(&model.integrand(j, values, sample)?, rule, cfg, delta, opts)
}

/// Gaussian interval with per-point noise scale `sigma` on the observed values.
#[allow(clippy::too_many_arguments)]
pub fn fpca_score_ci(
    model: &FpcaModel,
    j: usize,
    values: &[f64],
    sigma: &[f64],
    sample: &DesignSample,
    w: &WeightSet,
    delta: f64,
    mode: CltMode,
) -> Result<IntervalEstimate> {
    check_len(sample.len(), sigma.len())?;
    let psi = model.component(j)?;
    let f = design_density(sample)?;
    let scale = sample
        .points()
        .enumerate()
        .map(|(m, p)| (sigma[m] * psi.eval(p) / f[m]).abs())
        .collect();
    let ev = model.integrand(j, values, sample)?.with_noise_scale(scale)?;
    clt_ci(&ev, w, delta, mode)
}
