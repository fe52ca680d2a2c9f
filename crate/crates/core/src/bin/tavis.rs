use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tavis::scenario::{run_scenario, validate_config, Scenario};
use tavis::Error;

#[derive(Parser)]
#[command(name = "tavis", version, about = "Two-photon Tavis-Cummings atom in a non-uniform cavity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `output_dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides `seed` in the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List the built-in scenarios.
    Scenarios,
}

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_INVARIANT: u8 = 4;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Scenarios => {
            for s in Scenario::ALL {
                println!("{:<22} {}", s.name(), s.describe());
            }
            ExitCode::SUCCESS
        }
        Command::Run { config, out, seed } => run(config, out, seed),
    }
}

fn run(config: PathBuf, out: Option<PathBuf>, seed: Option<u64>) -> ExitCode {
    let raw = match std::fs::read_to_string(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", config.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let mut cfg = match validate_config(&raw) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let dir = out.or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    match run_scenario(&cfg, &dir) {
        Ok(m) if m.violations.is_empty() => {
            println!("{} finished in {:.2} s; {} outputs in {}", m.scenario.name(), m.wall_time_s, m.outputs.len(), dir.display());
            ExitCode::SUCCESS
        }
        Ok(m) => {
            for v in &m.violations {
                eprintln!("invariant violation: {v}");
            }
            ExitCode::from(EXIT_INVARIANT)
        }
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(e) => {
            eprintln!("error: {} failed: {e}", cfg.scenario.name());
            ExitCode::from(EXIT_NUMERIC)
        }
    }
}
