//! Command-line experiment runner: JSON config in, `samples.csv`, `fits.json` and
//! `report.json` out.
//!
//! Exit status is 0 when every verdict passes, 2 for an invalid configuration, a sampling plan
//! too thin to fit or an unusable output directory, 3 when the phase/symbol violate a hypothesis, 4 when a numerical method
//! fails and 5 when a verdict fails.

pub mod config;
pub mod run;

use std::path::PathBuf;

use clap::Parser;

pub use config::{ExperimentConfig, ExperimentKind};
pub use run::{execute, samples_csv, write_artifacts, RunOutput};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_HYPOTHESIS: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;
pub const EXIT_VERDICT: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "dispersive-lab", version, about = "Decay experiments for dispersive oscillatory kernels")]
pub struct Args {
    /// Experiment description (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; defaults to the config's `output.dir`, then `out/<name>`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads, 0 for one per core.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    #[arg(long)]
    pub verbose: bool,
}

/// Exit status for an error.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Config(_)
        | Error::InvalidSpec(_)
        | Error::Json(_)
        | Error::Io(_)
        | Error::InsufficientSpan { .. }
        | Error::InsufficientPoints { .. } => EXIT_CONFIG,
        Error::Hypothesis(_)
        | Error::ParameterRange { .. }
        | Error::RegionMembership { .. }
        | Error::EmptyInterval(_) => EXIT_HYPOTHESIS,
        Error::Domain { .. }
        | Error::ResolutionRejected { .. }
        | Error::Budget { .. }
        | Error::NonConvergence { .. }
        | Error::UnsupportedOrder(_)
        | Error::OscillationDominated { .. } => EXIT_NUMERIC,
    }
}

/// Validates, runs and writes one experiment; returns the process exit status.
pub fn run(args: &Args) -> i32 {
    let config = match ExperimentConfig::load(&args.config) {
        Ok(c) => c,
        Err(e) => return report_error(&e),
    };
    let prepared = match config.validate() {
        Ok(p) => p,
        Err(e) => return report_error(&e),
    };
    let dir = args
        .out
        .clone()
        .or_else(|| config.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out").join(&config.name));
    log::info!("running {} ({})", config.name, config.kind.as_str());
    let output = match execute(&config, &prepared) {
        Ok(o) => o,
        Err(e) => return report_error(&e),
    };
    if let Err(e) = write_artifacts(&dir, &config, &output, prepared.phase.dimension()) {
        return report_error(&e);
    }
    for v in &output.verdicts {
        println!(
            "{} {}",
            v["verdict"].as_str().unwrap_or("fail").to_uppercase(),
            v["check"].as_str().unwrap_or("")
        );
    }
    println!("artifacts written to {}", dir.display());
    if output.passed() {
        EXIT_OK
    } else {
        EXIT_VERDICT
    }
}

fn report_error(error: &Error) -> i32 {
    eprintln!("error: {error}");
    exit_code(error)
}

/// Entry point of the `dispersive-lab` binary.
pub fn main() -> i32 {
    let args = Args::parse();
    let level = if args.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(args.threads).build_global() {
        log::warn!("thread pool already initialised: {e}");
    }
    run(&args)
}
