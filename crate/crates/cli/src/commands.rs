use crate::args::{
    BenchArgs, DensityArgs, IntegrateArgs, IntervalArgs, MethodArg, ModeArg, PointInput, RegularityArgs, VarianceArg,
};
use crate::config::RunConfig;
use crate::error::{io_error, CliError, CliResult};
use crate::input::{read_curves, read_density_table, read_points};
use clap::ValueEnum;
use cneigh::fda::{fit_density_threshold, DensityConstants};
use cneigh::geometry::{TabulatedDensity, VolumeMethod, VolumeOptions};
use cneigh::infer::{clt_ci, clt_mean_interval, subsample_pi, CltMode, DEFAULT_REPLICATES};
use cneigh::regularity::{estimate_local_regularity, uniform_grid, CurveSet};
use cneigh::simulate::{run_experiment, summarize, write_csv};
use cneigh::weights::control_weights;
use cneigh::{
    DesignSample, Domain, IntegrandEvaluations, IntervalEstimate, IntervalMethod, Rule, SamplingMeasure,
    SubsampleConfig, WeightOptions, WeightVariant,
};
use std::fmt::Display;
use std::io::Write;
use std::path::Path;

pub const DEFAULT_LEVEL: f64 = 0.95;
pub const DEFAULT_GRID: usize = 20;
pub const FULL_REPS: usize = 2000;

/// Settings shared by every subcommand.
#[derive(Debug)]
pub struct Context {
    pub config: RunConfig,
    pub seed: u64,
    /// Whether the seed came from a flag, the environment or the config file.
    pub seed_explicit: bool,
}

/// `key: value` lines on stdout.
fn report(key: &str, value: impl Display) {
    println!("{key}: {value}");
}

fn parse_enum<T: ValueEnum>(key: &str, raw: &str) -> CliResult<T> {
    T::from_str(raw, true).map_err(|_| CliError::usage(format!("config: invalid {key} '{raw}'")))
}

fn resolve_method(flag: Option<MethodArg>, cfg: Option<&String>) -> CliResult<MethodArg> {
    match (flag, cfg) {
        (Some(m), _) => Ok(m),
        (None, Some(raw)) => parse_enum("method", raw),
        (None, None) => Ok(MethodArg::Nn),
    }
}

pub fn parse_density(spec: &str) -> CliResult<SamplingMeasure> {
    if spec.eq_ignore_ascii_case("uniform") {
        return Ok(SamplingMeasure::Uniform);
    }
    if let Some(b) = spec.strip_prefix("linear:") {
        let b: f64 = b
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("--density: cannot parse slope in '{spec}'")))?;
        return Ok(SamplingMeasure::linear(b)?);
    }
    let (grid, values) = read_density_table(Path::new(spec))?;
    Ok(SamplingMeasure::Tabulated(TabulatedDensity::new(grid, values)?))
}

fn rule_for(method: MethodArg, dim: usize) -> CliResult<Rule> {
    Ok(match method {
        MethodArg::Nn => Rule::ControlUnbiased,
        MethodArg::NnFast => Rule::ControlNn,
        MethodArg::Mean => Rule::Mean,
        MethodArg::Trapezoid if dim == 1 => Rule::Trapezoid,
        MethodArg::Trapezoid => {
            return Err(CliError::usage(format!(
                "trapezoid needs one-dimensional input, got dimension {dim}"
            )))
        }
    })
}

/// Asking for `nn` explicitly counts as consent to the costlier leave-one-out volumes.
fn weight_options(rule: Rule, mc_samples: Option<usize>, seed: u64) -> WeightOptions {
    WeightOptions {
        allow_expensive_loo: rule == Rule::ControlUnbiased,
        volumes: VolumeOptions {
            mc_samples,
            seed,
            ..VolumeOptions::default()
        },
        ..WeightOptions::default()
    }
}

fn load_evaluations(p: &PointInput, ctx: &Context, sigma_col: Option<&str>) -> CliResult<IntegrandEvaluations> {
    let table = read_points(&p.input, sigma_col)?;
    if let Some(d) = p.dim {
        if d != table.dim {
            return Err(CliError::usage(format!(
                "--dim {d} does not match the {} coordinate column(s) in the input",
                table.dim
            )));
        }
    }
    let measure = match p.density.as_ref().or(ctx.config.integrate.density.as_ref()) {
        Some(spec) => parse_density(spec)?,
        None => SamplingMeasure::Uniform,
    };
    let sample = DesignSample::new(Domain::cube(table.dim)?, table.coords, measure)?;
    let ev = IntegrandEvaluations::new(sample, table.values)?;
    Ok(match table.sigma {
        Some(s) => ev.with_noise_scale(s)?,
        None => ev,
    })
}

fn volume_name(m: VolumeMethod) -> &'static str {
    match m {
        VolumeMethod::Exact1d => "exact-1d",
        VolumeMethod::ExactPoly2d => "exact-polygon-2d",
        VolumeMethod::MonteCarlo => "monte-carlo",
    }
}

fn interval_name(m: IntervalMethod) -> &'static str {
    match m {
        IntervalMethod::SubsamplePi => "subsample-pi",
        IntervalMethod::CltCiConditional => "clt-conditional",
        IntervalMethod::CltCiLimit => "clt-limit",
        IntervalMethod::CltMean => "clt-mean",
    }
}

fn mc_samples(p: &PointInput, ctx: &Context) -> Option<usize> {
    p.mc_samples.or(ctx.config.integrate.mc_samples)
}

pub fn integrate(a: &IntegrateArgs, ctx: &Context) -> CliResult<()> {
    let method = resolve_method(a.method, ctx.config.integrate.method.as_ref())?;
    let ev = load_evaluations(&a.points, ctx, None)?;
    let rule = rule_for(method, ev.dim())?;
    let opts = weight_options(rule, mc_samples(&a.points, ctx), ctx.seed);
    let estimate = rule.estimate(&ev, &opts)?;
    report("seed", ctx.seed);
    report("method", rule.tag());
    report("dim", ev.dim());
    report("points", ev.len());
    if rule.is_control() {
        report("volumes", volume_name(opts.volumes.method_for(&ev.sample)));
    }
    report("estimate", estimate);
    Ok(())
}

fn resolve_level(flag: Option<f64>, ctx: &Context) -> CliResult<f64> {
    let level = flag.or(ctx.config.interval.level).unwrap_or(DEFAULT_LEVEL);
    if !(level > 0.0 && level < 1.0) {
        return Err(CliError::usage(format!("--level {level} must lie in (0, 1)")));
    }
    Ok(level)
}

fn conflict(flag: &str, mode: &str) -> CliError {
    CliError::usage(format!("{flag} cannot be used in {mode} mode"))
}

pub fn interval(a: &IntervalArgs, ctx: &Context) -> CliResult<()> {
    let icfg = &ctx.config.interval;
    let mode = match (a.mode, icfg.mode.as_ref()) {
        (Some(m), _) => m,
        (None, Some(raw)) => parse_enum("mode", raw)?,
        (None, None) => ModeArg::Pi,
    };
    let method = resolve_method(a.method, icfg.method.as_ref())?;
    let level = resolve_level(a.level, ctx)?;
    let delta = 1.0 - level;
    let mut beta_source = None;
    let est = match mode {
        ModeArg::Pi => {
            if a.sigma_col.is_some() {
                return Err(conflict("--sigma-col", "pi"));
            }
            if a.variance.is_some() {
                return Err(conflict("--variance", "pi"));
            }
            let ev = load_evaluations(&a.points, ctx, None)?;
            let rule = rule_for(method, ev.dim())?;
            let beta = if a.beta_auto {
                let path = a.curves.as_ref().expect("clap enforces --curves");
                let fit = regularity_fit(path, None, None, ctx)?;
                beta_source = Some("estimated");
                fit.beta_for(ev.len())
            } else {
                beta_source = Some("given");
                a.beta
                    .or(icfg.beta)
                    .ok_or_else(|| CliError::usage("pi mode needs --beta or --beta-auto"))?
            };
            let mut cfg = SubsampleConfig::new(beta, ctx.seed)
                .with_replicates(a.replicates.or(icfg.replicates).unwrap_or(DEFAULT_REPLICATES));
            if let Some(ms) = a.m_star.or(icfg.m_star) {
                cfg = cfg.with_m_star(ms);
            }
            let opts = weight_options(rule, mc_samples(&a.points, ctx), ctx.seed);
            (subsample_pi(&ev, rule, &cfg, delta, &opts)?, rule)
        }
        ModeArg::Ci => {
            for (set, flag) in [
                (a.beta.is_some(), "--beta"),
                (a.beta_auto, "--beta-auto"),
                (a.replicates.is_some(), "--B"),
                (a.m_star.is_some(), "--mstar"),
            ] {
                if set {
                    return Err(conflict(flag, "ci"));
                }
            }
            let col = a
                .sigma_col
                .as_deref()
                .ok_or_else(|| CliError::usage("ci mode needs --sigma-col"))?;
            let ev = load_evaluations(&a.points, ctx, Some(col))?;
            let rule = rule_for(method, ev.dim())?;
            let variance = match (a.variance, icfg.variance.as_ref()) {
                (Some(v), _) => v,
                (None, Some(raw)) => parse_enum("variance", raw)?,
                (None, None) => VarianceArg::Conditional,
            };
            let est = match rule {
                Rule::Mean => {
                    if a.variance == Some(VarianceArg::Limit) {
                        return Err(CliError::usage("--variance limit applies to control-neighbor methods only"));
                    }
                    clt_mean_interval(&ev, delta)?
                }
                Rule::Trapezoid => return Err(CliError::usage("ci mode does not support the trapezoid rule")),
                Rule::ControlUnbiased | Rule::ControlNn => {
                    let variant = if rule == Rule::ControlNn {
                        WeightVariant::NnVariant
                    } else {
                        WeightVariant::UnbiasedLoo
                    };
                    let opts = weight_options(rule, mc_samples(&a.points, ctx), ctx.seed);
                    let w = control_weights(&ev.sample, variant, &opts)?;
                    let mode = match variance {
                        VarianceArg::Conditional => CltMode::Conditional,
                        VarianceArg::Limit => CltMode::Limit1d,
                    };
                    clt_ci(&ev, &w, delta, mode)?
                }
            };
            (est, rule)
        }
    };
    print_interval(&est.0, est.1, ctx.seed, beta_source);
    Ok(())
}

fn print_interval(est: &IntervalEstimate, rule: Rule, seed: u64, beta_source: Option<&str>) {
    report("seed", seed);
    report("interval", interval_name(est.method));
    report("method", rule.tag());
    report("point", est.point);
    report("lower", est.lower);
    report("upper", est.upper);
    report("level", est.level);
    let m = &est.meta;
    if let Some(b) = m.beta {
        report("beta", b);
    }
    if let Some(src) = beta_source {
        report("beta_source", src);
    }
    if let Some(r) = m.rate {
        report("rate", r);
    }
    if let Some(b) = m.replicates {
        report("replicates", b);
    }
    if let Some(ms) = m.m_star {
        report("m_star", ms);
    }
    if let Some(s) = m.s_m {
        report("s_m", s);
    }
}

fn regularity_fit(
    path: &Path,
    grid: Option<usize>,
    delta: Option<f64>,
    ctx: &Context,
) -> CliResult<cneigh::regularity::RegularityEstimate> {
    let rcfg = &ctx.config.regularity;
    let table = read_curves(path, true)?;
    let values = table.values.expect("values requested");
    let set = CurveSet::from_pairs(table.t.into_iter().zip(values).collect())?;
    let n = grid.or(rcfg.grid).unwrap_or(DEFAULT_GRID);
    if n == 0 {
        return Err(CliError::usage("--grid must be positive"));
    }
    Ok(estimate_local_regularity(&set, &uniform_grid(n), delta.or(rcfg.delta))?)
}

fn create(path: &Path) -> CliResult<std::fs::File> {
    std::fs::File::create(path).map_err(|e| io_error(path, e))
}

/// Table destination: the given file, or stdout after the report lines.
fn table_writer(out: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(std::io::BufWriter::new(create(p)?)),
        None => {
            println!();
            Box::new(std::io::stdout().lock())
        }
    })
}

fn write_rows(mut w: Box<dyn Write>, header: &str, rows: impl Iterator<Item = Vec<f64>>) -> CliResult<()> {
    let res = (|| {
        writeln!(w, "{header}")?;
        for r in rows {
            let line: Vec<String> = r.iter().map(f64::to_string).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        w.flush()
    })();
    match res {
        // a closed downstream pipe (e.g. `| head`) is not an error
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => other.map_err(|e| CliError::Io(e.to_string())),
    }
}

pub fn regularity(a: &RegularityArgs, ctx: &Context) -> CliResult<()> {
    let fit = regularity_fit(&a.input, a.grid, a.delta, ctx)?;
    let beta = match a.m {
        Some(m) if m >= 2 => fit.beta_for(m),
        Some(m) => return Err(CliError::usage(format!("--m {m} must be at least 2"))),
        None => fit.beta,
    };
    // open the table file before reporting so that a bad path fails cleanly
    let w = match a.out.as_deref() {
        Some(p) => Some(create(p)?),
        None => None,
    };
    report("seed", ctx.seed);
    report("delta", fit.delta);
    report("h_min", fit.h_min);
    report("h_mean", fit.mean_h());
    report("beta", beta);
    let rows = (0..fit.t_grid.len()).map(|i| vec![fit.t_grid[i], fit.h[i], fit.l[i]]);
    let w: Box<dyn Write> = match w {
        Some(f) => Box::new(std::io::BufWriter::new(f)),
        None => table_writer(None)?,
    };
    write_rows(w, "t,h,l", rows)
}

pub fn density(a: &DensityArgs, ctx: &Context) -> CliResult<()> {
    let d = &ctx.config.density;
    let base = DensityConstants::default();
    let consts = DensityConstants {
        c_th: a.c_th.or(d.c_th).unwrap_or(base.c_th),
        c_k0: a.c_k0.or(d.c_k0).unwrap_or(base.c_k0),
        c_k1: a.c_k1.or(d.c_k1).unwrap_or(base.c_k1),
        floor: a.floor.or(d.floor).unwrap_or(base.floor),
        grid_size: a.grid_size.or(d.grid_size).unwrap_or(base.grid_size),
    };
    let table = read_curves(&a.input, false)?;
    let fit = fit_density_threshold(&table.t, &consts)?;
    let w = match a.out.as_deref() {
        Some(p) => Some(create(p)?),
        None => None,
    };
    report("seed", ctx.seed);
    report("curves", table.t.len());
    report("k_hat", fit.k_hat);
    report("retained", fit.coefficients.iter().filter(|c| **c != 0.0).count());
    let tab = fit.table();
    let rows = tab.grid().iter().zip(tab.values()).map(|(&t, &v)| vec![t, v]);
    let w: Box<dyn Write> = match w {
        Some(f) => Box::new(std::io::BufWriter::new(f)),
        None => table_writer(None)?,
    };
    write_rows(w, "t,density", rows)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.4}"))
}

pub fn bench(a: &BenchArgs, ctx: &Context) -> CliResult<()> {
    let file = RunConfig::load(&a.scenarios)?;
    let mut scenarios = file.scenarios()?;
    let reps = a.reps.or(a.full.then_some(FULL_REPS));
    for (sc, has_seed) in scenarios.iter_mut() {
        if ctx.seed_explicit || !*has_seed {
            sc.seed = ctx.seed;
        }
        if let Some(r) = reps {
            sc.reps = r;
        }
        sc.timing |= a.timing;
        sc.validate()?;
    }
    let out: Box<dyn Write> = match a.out.as_deref() {
        Some(p) => Box::new(std::io::BufWriter::new(create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut summary: Box<dyn Write> = if a.out.is_some() {
        Box::new(std::io::stdout())
    } else {
        Box::new(std::io::stderr())
    };
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    writeln!(summary, "seed: {}", ctx.seed).map_err(io)?;
    let mut records = Vec::new();
    let mut lines = Vec::new();
    for (sc, _) in &scenarios {
        let res = run_experiment(sc)?;
        for (m, why) in &res.skipped {
            lines.push(format!("# {}: {} skipped ({why})", sc.id, m.tag()));
        }
        for s in summarize(&res.records) {
            lines.push(format!(
                "{:<12} {:<7} {:>6} {:>9} {:>11} {:>16} {:>14}",
                sc.id,
                s.method.tag(),
                s.rows,
                fmt_opt(s.coverage),
                fmt_opt(s.mean_length),
                fmt_opt(s.median_log_ratio),
                format!("{:.3e}", s.mean_abs_error),
            ));
        }
        records.extend(res.records);
    }
    write_csv(&records, out)?;
    writeln!(
        summary,
        "{:<12} {:<7} {:>6} {:>9} {:>11} {:>16} {:>14}",
        "scenario", "method", "rows", "coverage", "mean_length", "median_log_ratio", "mean_abs_error"
    )
    .map_err(io)?;
    for l in lines {
        writeln!(summary, "{l}").map_err(io)?;
    }
    Ok(())
}
