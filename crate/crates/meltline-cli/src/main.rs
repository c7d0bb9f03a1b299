//! `meltline` — optimize and simulate melting/casting line scenarios.
//!
//! Three commands cover the pipeline: `solve` finds the profit-maximal
//! daily cycle plan for a scenario, `simulate` additionally builds and
//! checks the minute-level day schedule (with optional Gantt output),
//! and `report` compares a baseline scenario against an optimized one.
//!
//! Exit codes: 0 success, 1 parse or IO failure, 2 validation failure,
//! 3 schedule cross-check failure.

mod gantt;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use meltline::balance::PlanMode;

#[derive(Parser)]
#[command(
    name = "meltline",
    version,
    about = "Line-balancing optimizer and schedule simulator for melting/casting plants"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize a scenario and print the cycle plan and profit breakdown.
    Solve {
        /// Path to a scenario JSON file.
        scenario: PathBuf,
        /// Whether cycle counts may be fractional.
        #[arg(long, value_enum, default_value_t = Mode::Continuous)]
        mode: Mode,
        /// Emit the result as JSON instead of tables.
        #[arg(long)]
        json: bool,
    },
    /// Optimize, build the day schedule, simulate it, and reconcile.
    Simulate {
        /// Path to a scenario JSON file.
        scenario: PathBuf,
        /// Whether cycle counts may be fractional.
        #[arg(long, value_enum, default_value_t = Mode::Continuous)]
        mode: Mode,
        /// Emit the result as JSON instead of tables.
        #[arg(long)]
        json: bool,
        /// Write an SVG Gantt chart of the schedule to this path.
        #[arg(long)]
        gantt: Option<PathBuf>,
        /// Print a fixed-width text Gantt chart (table output only).
        #[arg(long)]
        gantt_text: bool,
    },
    /// Compare a baseline scenario against an optimized one.
    Report {
        /// Path to the baseline scenario JSON file.
        baseline: PathBuf,
        /// Path to the optimized scenario JSON file.
        optimized: PathBuf,
        /// Whether cycle counts may be fractional.
        #[arg(long, value_enum, default_value_t = Mode::Continuous)]
        mode: Mode,
        /// Emit the result as JSON instead of tables.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Continuous,
    Integer,
}

impl From<Mode> for PlanMode {
    fn from(mode: Mode) -> Self {
        match mode {
            Mode::Continuous => PlanMode::Continuous,
            Mode::Integer => PlanMode::Integer,
        }
    }
}

fn main() -> ExitCode {
    match run::dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
