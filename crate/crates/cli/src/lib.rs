//! Command-line frontend: walk states, table verification and derivation,
//! and a sampled end-to-end run.
//!
//! Exit codes: 0 when everything checked passes, 1 when a verification
//! fails, 2 for usage, I/O and data errors.

mod commands;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qwalk_core::walks::{ConfigKey, Protocol, Topology};

pub use report::RunReport;

/// Environment variable naming a directory of correction table files that
/// replaces the copies compiled into the binary.
pub const TABLE_DIR_VAR: &str = "QWALK_TABLE_DIR";

#[derive(Debug, Parser)]
#[command(name = "qwalk", version, about = "Coined quantum walk state preparation simulator")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Aligned tables.
    Text,
    /// JSON records.
    Machine,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the walked state after a number of steps.
    State {
        #[command(flatten)]
        target: Target,
        /// Steps to apply; defaults to the whole walk.
        #[arg(long)]
        upto: Option<usize>,
    },
    /// Check every row of a correction table against random targets.
    Verify {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Derive a correction table by exhaustive search and compare it with
    /// the published one.
    Derive {
        #[command(flatten)]
        target: Target,
        /// Where to write the derived table.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Compare against this table file instead of the published table.
        #[arg(long)]
        against: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sample one measurement record for given targets and apply the
    /// tabulated correction.
    Run {
        #[command(flatten)]
        target: Target,
        /// Alice's amplitudes as `a0,a1`.
        #[arg(long, value_parser = parse_amplitudes, allow_hyphen_values = true)]
        alice: (f64, f64),
        /// Bob's amplitudes as `b0,b1`.
        #[arg(long, value_parser = parse_amplitudes, allow_hyphen_values = true)]
        bob: (f64, f64),
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, Args)]
pub struct Target {
    #[arg(long, value_enum)]
    pub protocol: ProtocolArg,
    #[arg(long, value_enum)]
    pub topology: TopologyArg,
}

impl Target {
    pub fn key(self) -> ConfigKey {
        let protocol = match self.protocol {
            ProtocolArg::Uncontrolled => Protocol::Uncontrolled,
            ProtocolArg::Controlled => Protocol::Controlled,
        };
        let topology = match self.topology {
            TopologyArg::Line => Topology::Line,
            TopologyArg::K2 => Topology::TwoVertex,
            TopologyArg::C4 => Topology::Cycle4,
        };
        ConfigKey::new(protocol, topology)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProtocolArg {
    Uncontrolled,
    Controlled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TopologyArg {
    Line,
    K2,
    C4,
}

fn parse_amplitudes(s: &str) -> Result<(f64, f64), String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected two comma-separated numbers, got {s:?}"))?;
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok((parse(x)?, parse(y)?))
}

/// A finished command: the rendered report and whether its checks passed.
#[derive(Debug, Clone)]
pub struct Completed {
    pub report: RunReport,
    pub rendered: String,
    pub passed: bool,
}

pub fn execute(cli: &Cli) -> qwalk_core::Result<Completed> {
    let (report, passed) = match &cli.command {
        Command::State { target, upto } => commands::state(target.key(), *upto)?,
        Command::Verify { target, trials, seed } => commands::verify(target.key(), *trials as usize, *seed)?,
        Command::Derive { target, output, against, seed } => {
            commands::derive(target.key(), output.as_deref(), against.as_deref(), *seed)?
        }
        Command::Run { target, alice, bob, seed } => commands::run(target.key(), *alice, *bob, *seed)?,
    };
    let rendered = match cli.format {
        Format::Text => report.render_text(),
        Format::Machine => report.render_machine(),
    };
    Ok(Completed { report, rendered, passed })
}
