mod args;
mod commands;
mod config;
mod error;
mod input;

use args::{Cli, Command};
use clap::Parser;
use commands::Context;
use config::RunConfig;
use error::CliResult;

fn init_threads(jobs: Option<u64>) -> CliResult<()> {
    let Some(n) = jobs else { return Ok(()) };
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n as usize)
        .build_global()
        .map_err(|e| error::CliError::usage(format!("--jobs: {e}")))?;
    #[cfg(not(feature = "parallel"))]
    log::warn!("--jobs {n} ignored: built without the parallel feature");
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    let config = match &cli.global.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    init_threads(cli.global.jobs.or(config.run.jobs.map(|j| j as u64)))?;
    let explicit = cli.global.seed.or(config.run.seed);
    let ctx = Context {
        seed: explicit.unwrap_or_else(rand::random),
        seed_explicit: explicit.is_some(),
        config,
    };
    match &cli.command {
        Command::Integrate(a) => commands::integrate(a, &ctx),
        Command::Interval(a) => commands::interval(a, &ctx),
        Command::Bench(a) => commands::bench(a, &ctx),
        Command::Regularity(a) => commands::regularity(a, &ctx),
        Command::Density(a) => commands::density(a, &ctx),
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("CNEIGH_LOG", "warn")).init();
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.code());
    }
}
