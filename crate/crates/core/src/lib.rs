//! Nearest-neighbor control-variate Monte Carlo integration for functions
//! observed at random design points.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: domains, sampling measures, exact nearest-neighbor index,
//!   degrees and (leave-one-out) Voronoi volumes.
//! * [`weights`]: linear integration weights built from those summaries.
//! * [`integrate`]: sample mean, trapezoid and control-neighbor estimators.
//! * [`infer`]: subsampling prediction intervals and CLT confidence intervals.
//! * [`regularity`]: local Hölder exponent estimation and the choice of β.
//! * [`fda`]: regression prediction, fPCA scores, integrated depths and the
//!   thresholded design-density estimator.
//! * [`simulate`]: random processes and the replication harness.
//!
//! Data-parallel loops (replications, subsamples, Monte Carlo volumes) run on
//! rayon when the `parallel` feature is enabled, and sequentially otherwise.
//! Results do not depend on the number of threads.

pub mod error;
pub mod fda;
pub mod geometry;
pub mod infer;
pub mod integrate;
pub mod numeric;
pub mod parallel;
pub mod regularity;
pub mod rng;
pub mod simulate;
pub mod weights;

pub use error::{Error, Result};
pub use geometry::{DesignSample, Domain, NnIndex, SamplingMeasure, VoronoiSummary};
pub use integrate::{IntegrandEvaluations, Rule};
pub use infer::{IntervalEstimate, IntervalMethod, SubsampleConfig};
pub use weights::{WeightOptions, WeightSet, WeightVariant};



