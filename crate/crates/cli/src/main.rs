//! `linkplan`: outage and rate sweeps over RF-FSO relay scenarios, written as CSV.

mod commands;
mod config;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use crate::commands::Table;
use crate::config::Scenario;

#[derive(Parser)]
#[command(
    name = "linkplan",
    version,
    about = "Outage and ergodic-rate sweeps for HARQ RF-FSO relay networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Outage per grid point and evaluator.
    OutageSweep(Common),
    /// Ergodic rate per grid point with the limiting hop.
    RateSweep(Common),
    /// Fewest RF antennas matching the FSO rate, per RF hop and SNR.
    MinAntennas(Common),
    /// Every applicable closed form against Monte Carlo, hop by hop.
    Validate(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Monte Carlo seed, overriding `mc.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials, overriding `mc.trials`.
    #[arg(long)]
    trials: Option<u64>,
    /// Worker threads, overriding `mc.workers`.
    #[arg(long, env = "LINKPLAN_WORKERS")]
    workers: Option<usize>,
}

// Exit codes: 1 for unusable input or per-row evaluation errors, 2 for failed validation checks.
const EXIT_ERROR: u8 = 1;
const EXIT_CHECKS_FAILED: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args) = match &cli.command {
        Command::OutageSweep(a) => ("outage-sweep", a),
        Command::RateSweep(a) => ("rate-sweep", a),
        Command::MinAntennas(a) => ("min-antennas", a),
        Command::Validate(a) => ("validate", a),
    };
    match run(&cli.command, name, args) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("linkplan {name}: {message}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn run(command: &Command, name: &str, args: &Common) -> Result<ExitCode, String> {
    let text = fs::read_to_string(&args.config).map_err(|e| format!("cannot read {}: {e}", args.config.display()))?;
    let mut scenario = Scenario::parse(&text).map_err(|e| format!("{}: {e}", args.config.display()))?;
    if let Some(seed) = args.seed {
        scenario.mc.seed = seed;
    }
    if let Some(trials) = args.trials {
        scenario.mc.trials = trials;
    }
    if let Some(workers) = args.workers {
        if workers == 0 {
            return Err("--workers: at least one worker is required".into());
        }
        scenario.mc.workers = Some(workers);
    }
    let table = match command {
        Command::OutageSweep(_) => commands::outage_sweep(&scenario),
        Command::RateSweep(_) => Ok(commands::rate_sweep(&scenario)),
        Command::MinAntennas(_) => commands::min_antennas(&scenario),
        Command::Validate(_) => commands::validate(&scenario),
    }
    .map_err(|e| e.to_string())?;

    let csv = render(&table, name, &text, &scenario).map_err(|e| format!("writing CSV: {e}"))?;
    match &args.out {
        Some(path) => fs::write(path, &csv).map_err(|e| format!("cannot write {}: {e}", path.display()))?,
        None => std::io::stdout()
            .write_all(&csv)
            .map_err(|e| format!("writing output: {e}"))?,
    }
    if name == "validate" {
        let count = |s: &str| table.rows.iter().filter(|r| r[7] == s).count();
        eprintln!(
            "validate: {} pass, {} fail, {} skipped, {} errors",
            count("pass"),
            count("fail"),
            count("skip"),
            count("error")
        );
    }
    if table.errors > 0 {
        eprintln!(
            "linkplan {name}: {} row(s) could not be evaluated; see the error column",
            table.errors
        );
        return Ok(ExitCode::from(EXIT_ERROR));
    }
    if table.failed_checks > 0 {
        return Ok(ExitCode::from(EXIT_CHECKS_FAILED));
    }
    Ok(ExitCode::SUCCESS)
}

/// CSV body preceded by `#` provenance lines; contains nothing run-dependent
/// beyond the inputs, so reruns are byte-identical.
fn render(table: &Table, command: &str, config_text: &str, s: &Scenario) -> Result<Vec<u8>, csv::Error> {
    let mut out = Vec::new();
    let hash = Sha256::digest(config_text.as_bytes());
    let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
    out.extend_from_slice(format!("# linkplan {} {command}\n", env!("CARGO_PKG_VERSION")).as_bytes());
    out.extend_from_slice(format!("# config_sha256 {hex}\n").as_bytes());
    out.extend_from_slice(format!("# seed {}\n", s.mc.seed).as_bytes());
    out.extend_from_slice(format!("# trials {}\n", s.mc.trials).as_bytes());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}
