//! Random designs, random functions and the experiment harness.

pub mod harness;
pub mod process;

pub use harness::{run_experiment, summarize, write_csv, ExperimentOutput, ExperimentRecord, Method, MethodSummary, Scenario, ScenarioKind, CSV_HEADER};
pub use process::{
    add_noise, diagonal_eigenfunction, explained_variance, gen_design, gen_fbm, gen_path_1d, gen_surface_2d, log_ratio_risk,
    slope_alpha, zeta, KlPath, Process1DConfig, Process2DConfig, SlopeFunction, Surface,
};
