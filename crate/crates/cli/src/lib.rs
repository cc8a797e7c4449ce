//! Command-line front end for the purification toolkit.
//!
//! Six subcommands cover the workflows the library supports: `channel`
//! inspects a channel spec, `purify` runs the two-channel purification
//! protocol, `sweep` tabulates fidelities across a noise family,
//! `distribute` does the same for Bell-pair distribution with PPT verdicts,
//! `tomo` simulates a tomography experiment end to end, and `optics` solves
//! the beam-splitter phase-compensation system.
//!
//! Every run writes its artifacts (CSV or JSON) plus a `*_manifest.json`
//! into `--out`; identical seeds give byte-identical artifacts. Exit codes
//! are stable: 0 success, 1 I/O, 2 parse, 3 validation, 4 non-convergence.

pub mod artifact;
pub mod error;
pub mod reference;

mod cmd_channel;
mod cmd_distribute;
mod cmd_optics;
mod cmd_purify;
mod cmd_sweep;
mod cmd_tomo;

use std::path::PathBuf;
use std::str::FromStr;

use chanpure::qcore::{PauliChannel, QcoreError};
use chanpure::tomography::Shots;
use clap::{Parser, Subcommand, ValueEnum};

pub use error::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "chanpure",
    version,
    about = "Exact simulator and analysis tools for two-Fredkin channel purification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Base RNG seed for anything sampled.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Directory artifacts are written into.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,

    /// Format of tabular artifacts (sweep, distribute). Record-shaped
    /// commands always write JSON.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Tolerance for diagnostics: CPTP residuals and Kraus-rank cutoffs.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Inspect a channel spec: chi matrix, Pauli transfer matrix, Kraus
    /// rank, CPTP diagnostic.
    Channel {
        /// Path to a channel spec JSON file.
        #[arg(long)]
        spec: PathBuf,
    },
    /// Purify a pair of single-qubit channels; reports both branches, the
    /// virtual combination, and the circuit-vs-closed-form agreement.
    Purify {
        /// Spec of the channel applied first.
        #[arg(long)]
        channel1: PathBuf,
        /// Spec of the channel applied second.
        #[arg(long)]
        channel2: PathBuf,
        /// Interferometric visibility of the control qubit, in [0, 1].
        #[arg(long, default_value_t = 1.0)]
        visibility: f64,
    },
    /// Tabulate unpurified/physical/virtual average fidelities across a
    /// noise-parameter range.
    Sweep {
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Distribute one half of a Bell pair through a noisy channel, with
    /// and without purification; reports fidelities and PPT verdicts.
    Distribute {
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Simulate tomography counts for a channel and reconstruct it by
    /// maximum likelihood.
    Tomo {
        /// Path to a channel spec JSON file (single qubit).
        #[arg(long)]
        spec: PathBuf,
        /// Shots per measurement setting, or "exact" for Born probabilities.
        #[arg(long, default_value = "exact")]
        shots: ShotsArg,
        /// Iteration cap for the fixed-point solver.
        #[arg(long, default_value_t = 10_000)]
        max_iterations: usize,
    },
    /// Solve the beam-splitter phase compensation and verify the spatial
    /// Hadamard it produces.
    Optics {
        /// Path to a BsPhases JSON file.
        #[arg(long)]
        phases: PathBuf,
    },
}

/// Shared shape of the sweep-style subcommands.
#[derive(clap::Args, Debug)]
pub struct SweepArgs {
    /// Noise family swept over its probability parameter.
    #[arg(long, value_enum)]
    pub family: Family,
    /// First parameter value.
    #[arg(long)]
    pub start: f64,
    /// Last parameter value (inclusive).
    #[arg(long)]
    pub stop: f64,
    /// Number of grid points.
    #[arg(long)]
    pub steps: usize,
    /// Interferometric visibility of the control qubit, in [0, 1].
    #[arg(long, default_value_t = 1.0)]
    pub visibility: f64,
    /// Shots per tomography setting when sampling, or "exact" for the
    /// closed-form values.
    #[arg(long, default_value = "exact")]
    pub shots: ShotsArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Depolarizing,
    BitFlip,
    PhaseFlip,
}

impl Family {
    pub fn channel(self, p: f64) -> Result<PauliChannel<f64>, QcoreError> {
        match self {
            // p is the depolarizing strength: identity keeps p + (1-p)/4.
            Family::Depolarizing => chanpure::qcore::depolarizing_channel(p),
            // p is the identity probability; the flip gets 1 - p.
            Family::BitFlip => chanpure::qcore::bit_flip_channel(p),
            Family::PhaseFlip => chanpure::qcore::phase_flip_channel(p),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Depolarizing => "depolarizing",
            Family::BitFlip => "bit_flip",
            Family::PhaseFlip => "phase_flip",
        }
    }
}

/// Shot budget as a command-line value: a count or the word "exact".
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShotsArg(pub Shots);

impl FromStr for ShotsArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("exact") {
            return Ok(ShotsArg(Shots::Exact));
        }
        s.parse::<u64>()
            .map(|n| ShotsArg(Shots::Finite(n)))
            .map_err(|_| format!("expected a shot count or \"exact\", got {s:?}"))
    }
}

/// JSON echo of a shot budget for manifests.
pub fn shots_json(shots: Shots) -> serde_json::Value {
    match shots {
        Shots::Exact => serde_json::Value::from("exact"),
        Shots::Finite(n) => serde_json::Value::from(n),
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Channel { spec } => cmd_channel::run(cli, spec),
        Command::Purify {
            channel1,
            channel2,
            visibility,
        } => cmd_purify::run(cli, channel1, channel2, *visibility),
        Command::Sweep { sweep } => cmd_sweep::run(cli, sweep),
        Command::Distribute { sweep } => cmd_distribute::run(cli, sweep),
        Command::Tomo {
            spec,
            shots,
            max_iterations,
        } => cmd_tomo::run(cli, spec, shots.0, *max_iterations),
        Command::Optics { phases } => cmd_optics::run(cli, phases),
    }
}
