use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use micropolar_cli::{parse_config_with, run, threads_from_env, Experiment};

#[derive(Parser)]
#[command(
    name = "micropolar",
    version,
    about = "Thermomicropolar convection simulator and estimate verifier"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON run configuration
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Dotted-key override, e.g. `params.Ra=2` (repeatable)
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Random seed for initial data and trials
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a preset or checkpoint and check the energy envelopes
    Simulate(Common),
    /// Run the monitors on an existing ledger CSV
    Verify {
        #[command(flatten)]
        common: Common,
        /// Ledger CSV (overrides verify.ledger)
        ledger: Option<PathBuf>,
    },
    /// Estimate the inequality constants k1..k7
    Constants(Common),
    /// Continuous-dependence experiment
    Depend(Common),
    /// Galerkin convergence study
    Converge(Common),
    /// Write the basis manifest
    Basis(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match threads_from_env() {
        Ok(Some(n)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("error: thread pool: {e}");
                return ExitCode::from(2);
            }
        }
        Ok(None) => {}
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let (experiment, common, ledger) = match cli.command {
        Command::Simulate(c) => (Experiment::Simulate, c, None),
        Command::Verify { common, ledger } => (Experiment::Verify, common, ledger),
        Command::Constants(c) => (Experiment::Constants, c, None),
        Command::Depend(c) => (Experiment::Depend, c, None),
        Command::Converge(c) => (Experiment::Converge, c, None),
        Command::Basis(c) => (Experiment::Basis, c, None),
    };
    match execute(experiment, common, ledger) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn execute(experiment: Experiment, common: Common, ledger: Option<PathBuf>) -> anyhow::Result<u8> {
    let text = match &common.config {
        Some(p) => std::fs::read_to_string(p).map_err(|e| anyhow::anyhow!("reading {}: {e}", p.display()))?,
        None => String::new(),
    };
    let mut overrides = common.overrides.clone();
    let exp = serde_json::to_string(&experiment)?;
    overrides.push(format!("experiment={exp}"));
    if let Some(out) = &common.out {
        overrides.push(format!("output={}", serde_json::to_string(out)?));
    }
    if let Some(seed) = common.seed {
        overrides.push(format!("seed={seed}"));
    }
    if let Some(l) = &ledger {
        overrides.push(format!("verify.ledger={}", serde_json::to_string(l)?));
    }
    let cfg = parse_config_with(&text, &overrides)?;
    let outcome = run(&cfg)?;
    // A closed pipe on stdout must not turn a finished run into a failure.
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{}", outcome.summary.trim_end());
    for a in &outcome.artifacts {
        let _ = writeln!(out, "wrote {}", a.display());
    }
    Ok(outcome.exit_code as u8)
}
