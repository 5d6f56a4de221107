//! Functional data applications: each quantity is an integral over the
//! design domain, estimated by a control-neighbor rule.
//!
//! Auxiliary functions (slope, mean, eigenfunctions, weights) are supplied
//! by the caller as [`Evaluator`]s. The design density is read from the
//! sample's [`SamplingMeasure`](crate::geometry::SamplingMeasure); every
//! integrand is divided by it.

pub mod density;
pub mod depth;
pub mod eval;
pub mod fpca;
pub mod regression;

pub use density::{fit_density_threshold, DensityConstants, DensityFit};
pub use depth::{depth_mfd, depth_mfd_pi, tukey_depth, DepthSpec, Marginal, DEPTH_BETA};
pub use eval::{Evaluator, SharedEvaluator, Tabulated};
pub use fpca::{fpca_score, fpca_score_ci, fpca_score_pi, FpcaModel};
pub use regression::{glm_transform_interval, predict_flm, predict_flm_ci_noisy, predict_flm_pi, Link, RegressionModel};

use crate::error::{Error, Result};
use crate::geometry::DesignSample;

/// Lower bound on the design density before dividing by it.
pub const DENSITY_FLOOR: f64 = 1e-3;

/// `f_T(T_m)` at every design point, checked against [`DENSITY_FLOOR`].
pub(crate) fn design_density(sample: &DesignSample) -> Result<Vec<f64>> {
    sample
        .points()
        .enumerate()
        .map(|(index, p)| {
            let value = sample.measure().density(p);
            if value >= DENSITY_FLOOR {
                Ok(value)
            } else {
                Err(Error::DensityFloor { index, value })
            }
        })
        .collect()
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, got })
    }
}
