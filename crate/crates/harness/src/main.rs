use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rcga_harness::{run_file, ExperimentKind, Options};

/// Configuration-driven r-cGA experiment campaigns.
#[derive(Parser)]
#[command(name = "rcga", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Independent replicas of single runs.
    Run(Flags),
    /// Runtime scaling over an (n, r) grid.
    Scaling(Flags),
    /// Biased/random-walk step classification and decomposition.
    Drift(Flags),
    /// Per-phase suffix ratio tracking.
    Phases(Flags),
    /// Monte Carlo verification of the analytic bounds.
    Verify(Flags),
}

#[derive(Args)]
struct Flags {
    /// Campaign file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `out` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base seed; overrides `base_seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Also write an SVG chart of normalized runtime against n.
    #[arg(long)]
    emit_plots: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (kind, flags) = match cli.command {
        Command::Run(f) => (ExperimentKind::Run, f),
        Command::Scaling(f) => (ExperimentKind::Scaling, f),
        Command::Drift(f) => (ExperimentKind::Drift, f),
        Command::Phases(f) => (ExperimentKind::Phases, f),
        Command::Verify(f) => (ExperimentKind::Verify, f),
    };
    let opts = Options { out: flags.out, seed: flags.seed, threads: flags.threads, emit_plots: flags.emit_plots };
    match run_file(Some(kind), &flags.config, &opts) {
        Ok(outcome) => {
            for c in &outcome.checks {
                eprintln!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            println!("{}", outcome.out.display());
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
