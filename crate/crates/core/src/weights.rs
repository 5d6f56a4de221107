//! Control-neighbor integration weights.
//!
//! Both rules are linear: `Î(φ) = Σ w_m φ(T_m)`.
//!
//! * unbiased leave-one-out: `w_m = (1 + c_m - d_m) / M`
//! * nearest-neighbor variant: `w_m = (1 + M V_m - d_m) / M`
//!
//! with `d_m` the degree, `c_m` the cumulative leave-one-out Voronoi volume
//! and `V_m` the standard Voronoi volume of `T_m`. Weights can be negative and
//! are never clipped.

use crate::error::{Error, Result};
use crate::geometry::{voronoi_summary, DesignSample, VolumeOptions, VoronoiSummary};
use crate::numeric::neumaier_sum;
use log::warn;

/// Minimum sample size for the variance bound of the unbiased rule.
pub const STRICT_MIN_POINTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightVariant {
    UnbiasedLoo,
    NnVariant,
}

impl WeightVariant {
    /// Unbiased weights on the line, the cheaper variant elsewhere.
    pub fn default_for_dim(dim: usize) -> Self {
        if dim == 1 {
            WeightVariant::UnbiasedLoo
        } else {
            WeightVariant::NnVariant
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct WeightOptions {
    /// Refuse unbiased weights for `M < 4` instead of warning.
    pub strict: bool,
    /// Allow leave-one-out cumulative volumes when `d > 1`.
    pub allow_expensive_loo: bool,
    pub volumes: VolumeOptions,
}

impl WeightOptions {
    pub fn permissive() -> Self {
        Self::default()
    }

    pub fn with_expensive_loo(mut self) -> Self {
        self.allow_expensive_loo = true;
        self
    }
}

#[derive(Debug, Clone)]
pub struct WeightSet {
    pub weights: Vec<f64>,
    pub variant: WeightVariant,
    pub source: VoronoiSummary,
}

impl WeightSet {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Compensated `Σ w_m`.
    pub fn sum(&self) -> f64 {
        neumaier_sum(self.weights.iter().copied())
    }

    /// `Σ w_m² `
    pub fn sum_sq(&self) -> f64 {
        self.weights.iter().map(|w| w * w).sum()
    }

    /// `Σ w_m v_m`
    pub fn dot(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.weights.len() {
            return Err(Error::LengthMismatch {
                expected: self.weights.len(),
                got: values.len(),
            });
        }
        Ok(self.weights.iter().zip(values).map(|(w, v)| w * v).sum())
    }
}

/// Unbiased leave-one-out control-neighbor weights.
pub fn control_weights_unbiased(sample: &DesignSample, opts: &WeightOptions) -> Result<WeightSet> {
    let m = sample.len();
    if m < 2 {
        return Err(Error::InsufficientPoints { needed: 2, got: m });
    }
    if m < STRICT_MIN_POINTS {
        if opts.strict {
            return Err(Error::StrictSampleSize(m));
        }
        warn!("unbiased control-neighbor weights with M = {m} < {STRICT_MIN_POINTS}");
    }
    if sample.dim() > 1 && !opts.allow_expensive_loo {
        return Err(Error::ExpensiveLooRequired { dim: sample.dim() });
    }
    let source = voronoi_summary(sample, &opts.volumes, true)?;
    let mf = m as f64;
    let c = source
        .loo_cum_volumes
        .as_ref()
        .expect("summary computed with cumulative volumes");
    let weights = source
        .degrees
        .iter()
        .zip(c)
        .map(|(&d, &c)| (1.0 + c - d as f64) / mf)
        .collect();
    Ok(WeightSet {
        weights,
        variant: WeightVariant::UnbiasedLoo,
        source,
    })
}

/// Nearest-neighbor variant built from standard Voronoi volumes.
pub fn control_weights_nn(sample: &DesignSample, opts: &WeightOptions) -> Result<WeightSet> {
    let m = sample.len();
    if m < 2 {
        return Err(Error::InsufficientPoints { needed: 2, got: m });
    }
    let source = voronoi_summary(sample, &opts.volumes, false)?;
    let mf = m as f64;
    let weights = source
        .degrees
        .iter()
        .zip(&source.std_volumes)
        .map(|(&d, &v)| (1.0 + mf * v - d as f64) / mf)
        .collect();
    Ok(WeightSet {
        weights,
        variant: WeightVariant::NnVariant,
        source,
    })
}

pub fn control_weights(sample: &DesignSample, variant: WeightVariant, opts: &WeightOptions) -> Result<WeightSet> {
    match variant {
        WeightVariant::UnbiasedLoo => control_weights_unbiased(sample, opts),
        WeightVariant::NnVariant => control_weights_nn(sample, opts),
    }
}
