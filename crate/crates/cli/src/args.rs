use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

/// Nearest-neighbor control-variate integration for functional data.
#[derive(Debug, Parser)]
#[command(name = "cneigh", version, about)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML configuration file (see docs/config.md).
    #[arg(long, global = true, env = "CNEIGH_CONFIG", value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Master seed for every random stream; drawn from system entropy and echoed when absent.
    #[arg(long, global = true, env = "CNEIGH_SEED")]
    pub seed: Option<u64>,
    /// Worker threads for data-parallel loops (default: available cores).
    #[arg(long, global = true, env = "CNEIGH_JOBS", value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the integral of a function observed at design points.
    Integrate(IntegrateArgs),
    /// Prediction (subsampling) or confidence (CLT) interval for the integral.
    Interval(IntervalArgs),
    /// Run replicated simulation scenarios and write per-replication CSV rows.
    Bench(BenchArgs),
    /// Estimate local Hölder regularity of a set of curves and the exponent β.
    Regularity(RegularityArgs),
    /// Fit the thresholded cosine-series design density from pooled curve designs.
    Density(DensityArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// Control neighbors with unbiased leave-one-out weights.
    Nn,
    /// Control neighbors with nearest-neighbor volume weights.
    NnFast,
    /// Plain sample mean.
    Mean,
    /// Trapezoidal rule on [0,1] (one-dimensional input only).
    Trapezoid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Subsampling prediction interval for noiseless evaluations.
    Pi,
    /// Gaussian confidence interval for noisy evaluations.
    Ci,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VarianceArg {
    /// Plug-in variance Σ w_m² σ_m².
    Conditional,
    /// Asymptotic variance 2.5 · mean(σ²) / M (one-dimensional uniform designs).
    Limit,
}

#[derive(Debug, Args)]
pub struct PointInput {
    /// CSV with columns t (or t1..td) and value; '-' reads stdin.
    pub input: PathBuf,
    /// Design density: 'uniform', 'linear:B' (f(t) = 1 - B/2 + B t), or a CSV file with columns t,density.
    #[arg(long, env = "CNEIGH_DENSITY")]
    pub density: Option<String>,
    /// Expected dimension of the design; must match the coordinate columns.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Monte Carlo draws per volume estimate where no exact backend applies.
    #[arg(long, env = "CNEIGH_MC_SAMPLES")]
    pub mc_samples: Option<usize>,
}

#[derive(Debug, Args)]
pub struct IntegrateArgs {
    #[command(flatten)]
    pub points: PointInput,
    /// Integration rule [default: nn].
    #[arg(long, value_enum, env = "CNEIGH_METHOD")]
    pub method: Option<MethodArg>,
}

#[derive(Debug, Args)]
pub struct IntervalArgs {
    #[command(flatten)]
    pub points: PointInput,
    /// Interval type [default: pi].
    #[arg(long, value_enum, env = "CNEIGH_MODE")]
    pub mode: Option<ModeArg>,
    /// Point estimator the interval is built around [default: nn].
    #[arg(long, value_enum, env = "CNEIGH_METHOD")]
    pub method: Option<MethodArg>,
    /// Hölder exponent β of the integrand (pi mode).
    #[arg(long, env = "CNEIGH_BETA", conflicts_with = "beta_auto")]
    pub beta: Option<f64>,
    /// Estimate β from a learning set of curves given by --curves (pi mode).
    #[arg(long, requires = "curves")]
    pub beta_auto: bool,
    /// Learning-set CSV with columns curve,t,value for --beta-auto.
    #[arg(long, value_name = "FILE")]
    pub curves: Option<PathBuf>,
    /// Number of subsamples B (pi mode) [default: 1000].
    #[arg(long = "B", visible_alias = "replicates", env = "CNEIGH_REPLICATES")]
    pub replicates: Option<usize>,
    /// Subsample size M* (pi mode) [default: floor(M/2)].
    #[arg(long = "mstar", env = "CNEIGH_MSTAR")]
    pub m_star: Option<usize>,
    /// Nominal coverage 1 - δ [default: 0.95].
    #[arg(long, env = "CNEIGH_LEVEL")]
    pub level: Option<f64>,
    /// Column holding per-point noise standard deviations (required in ci mode, rejected in pi mode).
    #[arg(long)]
    pub sigma_col: Option<String>,
    /// Variance used by the ci mode [default: conditional].
    #[arg(long, value_enum, env = "CNEIGH_VARIANCE")]
    pub variance: Option<VarianceArg>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// TOML file with one or more [[scenario]] tables.
    pub scenarios: PathBuf,
    /// Override the replication count of every scenario.
    #[arg(long, env = "CNEIGH_REPS")]
    pub reps: Option<usize>,
    /// Use 2000 replications per scenario unless --reps is given.
    #[arg(long)]
    pub full: bool,
    /// Output CSV path; stdout when absent (the summary then goes to stderr).
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Fill the seconds column with wall-clock timings (output is then not reproducible).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct RegularityArgs {
    /// CSV with columns curve,t,value.
    pub input: PathBuf,
    /// Number of evaluation points (i + 1/2)/n [default: 20].
    #[arg(long)]
    pub grid: Option<usize>,
    /// Half window width δ [default: twice the median within-curve spacing].
    #[arg(long)]
    pub delta: Option<f64>,
    /// Design size M the exponent β is selected for [default: mean curve size].
    #[arg(long)]
    pub m: Option<usize>,
    /// Write the t,h,l table here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    /// CSV with columns curve,t (a value column is ignored).
    pub input: PathBuf,
    /// Threshold constant: keep θ_k when θ_k² exceeds c_th times its variance [default: 0.4].
    #[arg(long)]
    pub c_th: Option<f64>,
    /// Cutoff intercept: K_max = floor(c_k0 + c_k1 ln M) [default: 3].
    #[arg(long)]
    pub c_k0: Option<f64>,
    /// Cutoff slope [default: 0.8].
    #[arg(long)]
    pub c_k1: Option<f64>,
    /// Clip floor before renormalization [default: 0.001].
    #[arg(long)]
    pub floor: Option<f64>,
    /// Points of the output grid on [0,1] [default: 2001].
    #[arg(long)]
    pub grid_size: Option<usize>,
    /// Write the t,density table here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}
