//! `fracsum`: build schedules and digit-restriction sets, run estimator
//! sweeps and verification suites, and write exact reports.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
//! 3 resource budget exceeded.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{ConvexityArgs, Outcome};
use config::{RunConfig, Settings};

#[derive(Parser, Debug)]
#[command(name = "fracsum", version, about = "Digit-restriction sets, sumsets and dyadic measures at finite depth")]
struct Cli {
    #[command(flatten)]
    settings: Settings,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Interval schedules (gamma, eta) for i <= imax and the block lengths zeta.
    Schedule,
    /// Box-count, OFF and estimate table of a set (or its j-fold sum).
    Dim {
        #[arg(long, default_value = "toy")]
        set: String,
        #[arg(long)]
        j: Option<u64>,
    },
    /// The j-fold sumset at --depth as runs of consecutive indices.
    Sumset {
        #[arg(long, default_value = "toy")]
        set: String,
        #[arg(long, default_value_t = 2)]
        j: u64,
        /// Also compare the digit DP against brute-force enumeration.
        #[arg(long)]
        oracle: bool,
    },
    /// Mass bounds for the measure of the toy or faithful schedule index --i.
    Measure,
    /// Midpoint certification and hull gaps of E = union of A_j/j, j <= jmax.
    Convexity {
        #[arg(long, default_value = "toy")]
        set: String,
        /// Check every pair of witnessed points instead of sampling.
        #[arg(long, value_name = "MAX_PAIRS")]
        exhaustive: Option<u64>,
        /// Run the halving containment check with base depth M.
        #[arg(long, value_name = "M")]
        halving_depth: Option<u32>,
        #[arg(long, default_value_t = 4)]
        r0_cells: u64,
    },
    /// Every acceptance check, with one pass/fail line each.
    Report,
}

fn run(cli: Cli) -> fracsum_core::Result<(RunConfig, &'static str, Outcome)> {
    let cfg = RunConfig::resolve(cli.settings)?;
    let (name, outcome) = match cli.command {
        Command::Schedule => ("schedule", commands::schedule(&cfg)?),
        Command::Dim { set, j } => ("dim", commands::dim(&cfg, &set, j)?),
        Command::Sumset { set, j, oracle } => ("sumset", commands::sumset(&cfg, &set, j, oracle)?),
        Command::Measure => ("measure", commands::measure(&cfg)?),
        Command::Convexity {
            set,
            exhaustive,
            halving_depth,
            r0_cells,
        } => (
            "convexity",
            commands::convexity(
                &cfg,
                &ConvexityArgs {
                    set,
                    exhaustive,
                    halving_depth,
                    r0_cells,
                },
            )?,
        ),
        Command::Report => ("report", commands::report(&cfg)?),
    };
    Ok((cfg, name, outcome))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(cli).and_then(|(cfg, name, outcome)| {
        output::emit(&cfg, name, &outcome.output)?;
        Ok(outcome.verified)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("fracsum: verification failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("fracsum: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
