//! Command-line front end: `sweep`, `snapshot` and `validate`.
//!
//! `sweep` writes CSV with the columns
//!
//! ```text
//! strategy,sweep_value,mean_rate,std_error,n_trials,seed,scenario_hash
//! ```
//!
//! one row per (strategy, sweep point), strategies in the order requested.
//! `scenario_hash` identifies the fully resolved scenario (see
//! [`Scenario::hash`]). `snapshot` writes one pretty-printed JSON document.
//! Without `--out` both write to stdout.
//!
//! Exit codes: 0 on success, 1 on runtime errors or failed checks, 2 on
//! usage errors.

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::evaluation::{run_experiments, snapshot_beams, Snapshot, Sweep};
use crate::scenario::{load_scenario, Scenario};
use crate::strategies::Strategy;
use crate::validate::{run_suite, SuiteConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const CSV_HEADER: [&str; 7] = [
    "strategy",
    "sweep_value",
    "mean_rate",
    "std_error",
    "n_trials",
    "seed",
    "scenario_hash",
];

#[derive(Debug, Parser)]
#[command(name = "beamalign", version, about = "Location-aided mmWave beam pre-selection simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mean achievable rate per strategy over an SNR or beam-budget sweep (CSV).
    Sweep(SweepArgs),
    /// Beams chosen by each strategy in one realization (JSON).
    Snapshot(SnapshotArgs),
    /// Run the built-in oracle checks.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Scenario JSON file; built-in defaults when omitted.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Comma-separated list: idealized, naive, one-step, two-step.
    #[arg(long, default_value = "idealized,naive,one-step,two-step")]
    pub strategies: String,
    /// Master seed; defaults to the scenario's strategy seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides the Monte-Carlo iterations of the robust strategies.
    #[arg(long)]
    pub mc_iterations: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// `snr:<lo>:<hi>:<step>` or `d:<lo>:<hi>`; defaults to the scenario's sweep.
    #[arg(long)]
    pub sweep: Option<String>,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
}

#[derive(Debug, Args)]
pub struct SnapshotArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Monte-Carlo draws per instance in the gain check.
    #[arg(long, default_value_t = 20_000)]
    pub samples: usize,
    /// Also write the report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Sweep(a) => cmd_sweep(&a, out),
        Command::Snapshot(a) => cmd_snapshot(&a, out),
        Command::Validate(a) => cmd_validate(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Runtime(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAILURE
        }
    }
}

struct Prepared {
    scenario: Scenario,
    strategies: Vec<Strategy>,
    seed: u64,
}

fn prepare(common: &CommonArgs) -> std::result::Result<Prepared, Failure> {
    let strategies = Strategy::parse_list(&common.strategies).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut scenario = match &common.scenario {
        Some(path) => load_scenario(path)?,
        None => Scenario::default(),
    };
    if let Some(mc) = common.mc_iterations {
        if mc == 0 {
            return Err(Failure::Usage("--mc-iterations must be at least 1".into()));
        }
        scenario.strategy.mc_iterations = mc;
        scenario.strategy.inner_mc_iterations = None;
    }
    let seed = common.seed.unwrap_or(scenario.strategy.seed);
    scenario.strategy.seed = seed;
    Ok(Prepared { scenario, strategies, seed })
}

fn emit(path: Option<&Path>, bytes: &[u8], out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|source| Error::Io {
            path: p.display().to_string(),
            source,
        }),
        None => out.write_all(bytes).map_err(|source| Error::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> std::result::Result<i32, Failure> {
    let Prepared { scenario, strategies, seed } = prepare(&args.common)?;
    let sweep: Sweep = match &args.sweep {
        Some(s) => s.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?,
        None => scenario.sweep.clone(),
    };
    if args.trials == 0 {
        return Err(Failure::Usage("--trials must be at least 1".into()));
    }
    let run = run_experiments(&scenario, &strategies, &sweep, args.trials, seed)?;
    let hash = scenario.hash();

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).map_err(Error::from)?;
    for r in run.summary() {
        w.write_record([
            r.strategy.to_string(),
            r.sweep_value.to_string(),
            r.mean_rate.to_string(),
            r.std_error.to_string(),
            r.n_trials.to_string(),
            seed.to_string(),
            hash.clone(),
        ])
        .map_err(Error::from)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io {
        path: "<csv buffer>".into(),
        source: e.into_error(),
    })?;
    emit(args.common.out.as_deref(), &bytes, out)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct SnapshotDocument<'a> {
    scenario_hash: String,
    #[serde(flatten)]
    snapshot: &'a Snapshot,
}

fn cmd_snapshot(args: &SnapshotArgs, out: &mut dyn Write) -> std::result::Result<i32, Failure> {
    let Prepared { scenario, strategies, seed } = prepare(&args.common)?;
    let snapshot = snapshot_beams(&scenario, &strategies, seed)?;
    let doc = SnapshotDocument { scenario_hash: scenario.hash(), snapshot: &snapshot };
    let mut bytes = serde_json::to_vec_pretty(&doc).map_err(Error::from)?;
    bytes.push(b'\n');
    emit(args.common.out.as_deref(), &bytes, out)?;
    Ok(EXIT_OK)
}

fn cmd_validate(args: &ValidateArgs, out: &mut dyn Write) -> std::result::Result<i32, Failure> {
    if args.samples == 0 {
        return Err(Failure::Usage("--samples must be at least 1".into()));
    }
    let cfg = SuiteConfig { gain_samples: args.samples, seed: args.seed, ..SuiteConfig::default() };
    let checks = run_suite(&cfg)?;
    let mut report = String::new();
    for c in &checks {
        report.push_str(&c.line());
        report.push('\n');
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    report.push_str(&format!("{} of {} checks passed\n", checks.len() - failed, checks.len()));
    if let Some(path) = &args.out {
        emit(Some(path), report.as_bytes(), out)?;
    }
    out.write_all(report.as_bytes()).map_err(|source| Error::Io { path: "<stdout>".into(), source })?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_FAILURE })
}
