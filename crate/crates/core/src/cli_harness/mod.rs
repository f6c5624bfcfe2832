//! Scenario configs, the three commands and their report files.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{apply_tolerances, flow, identities, initial_state, variation_sources, variations, Outcome};
pub use config::{PotentialSource, RawSource, ScenarioConfig, VariationSources, MAX_AMPLITUDE};

use crate::error::Error;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "kvc", version, about = "Spectral checks of Kähler variation formulas and the soliton-Kähler-Ricci flow")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; falls back to `out` in the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Multiplies every tolerance.
    #[arg(long, default_value_t = 1.0)]
    pub tolerance_scale: f64,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fixed-state identities: identities.csv and summary.json.
    Identities(RunArgs),
    /// Variation formulas against finite differences: variations.csv and summary.json.
    Variations(RunArgs),
    /// Flow run with evolution checks: flow.csv, flow_series.csv, summary.json, trajectory/.
    Flow(RunArgs),
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Numerical(_) | Error::Projection { .. } | Error::Precondition { .. } => EXIT_NUMERICAL,
        _ => EXIT_CONFIG,
    }
}

fn prepare(args: &RunArgs) -> Result<(ScenarioConfig, PathBuf), Error> {
    let mut cfg = ScenarioConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if !(args.tolerance_scale > 0.0) || !args.tolerance_scale.is_finite() {
        return Err(Error::Config(format!("tolerance scale {} must be positive", args.tolerance_scale)));
    }
    let out = args.out.clone().or_else(|| cfg.out.clone()).ok_or_else(|| Error::Config("no output directory: pass --out or set `out`".into()))?;
    Ok((cfg, out))
}

fn execute(command: &Command) -> Result<i32, Error> {
    let (name, csv, args) = match command {
        Command::Identities(a) => ("identities", "identities.csv", a),
        Command::Variations(a) => ("variations", "variations.csv", a),
        Command::Flow(a) => ("flow", "flow.csv", a),
    };
    let (cfg, out) = prepare(args)?;
    let outcome = match command {
        Command::Identities(_) => identities(&cfg)?,
        Command::Variations(_) => variations(&cfg)?,
        Command::Flow(_) => {
            let (o, traj) = flow(&cfg)?;
            commands::write_flow_outputs(&out, &cfg, &traj)?;
            o
        }
    };
    let outcome = Outcome { report: apply_tolerances(outcome.report, &cfg, args.tolerance_scale), abort: outcome.abort };
    commands::write_report(&out, csv, name, &cfg, &outcome)?;
    for r in outcome.report.failures() {
        eprintln!("FAIL {} residual {:.3e} tolerance {:.3e}", r.check_id, r.residual, r.tolerance);
    }
    if let Some(msg) = &outcome.abort {
        eprintln!("numerical abort: {msg}");
        return Ok(EXIT_NUMERICAL);
    }
    Ok(if outcome.report.all_pass() { EXIT_PASS } else { EXIT_CHECK_FAILURE })
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
        }
    };
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
