//! The `bcst` command line.
//!
//! Every command prints one document: either JSON of the shape
//! `{schema_version, command, seed, inputs, results, diagnostics}` or a plain
//! text summary. Exit codes: 0 success, 1 internal error, 2 usage or parse
//! error, 3 a published table (or table-2 check) disagrees with the oracle.

mod commands;

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::Error;

pub const SCHEMA_VERSION: u32 = 1;

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 1729;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "bcst",
    version,
    about = "Bidirectional controlled teleportation simulator and verifier"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Seed for every random choice in the run.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Args, Debug, Clone)]
pub struct ChannelArgs {
    /// Channel spec, e.g. `psi+,psi+,psi-,psi-;basis=+/-;sign=+`.
    #[arg(long, conflicts_with = "state")]
    pub spec: Option<String>,

    /// Named published state: zha, zha-prime or li.
    #[arg(long)]
    pub state: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the channel quadruples that satisfy ψ1 ≠ ψ3, ψ2 ≠ ψ4.
    Enumerate {
        /// `+/-`, `0/1` or `theta=<rad>,phi=<rad>`.
        #[arg(long, default_value = "+/-", allow_hyphen_values = true)]
        basis: String,
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        sign: String,
        /// Check that the nine published example quadruples are listed.
        #[arg(long)]
        verify_table2: bool,
        /// List the violating quadruples instead.
        #[arg(long)]
        invert: bool,
    },
    /// Per-direction control analysis of a named state or a channel spec.
    Validate {
        /// Named state (same as --state).
        name: Option<String>,
        #[command(flatten)]
        channel: ChannelArgs,
    },
    /// Run the perfect protocol.
    Simulate {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long, default_value = "true", action = clap::ArgAction::Set)]
        disclose: bool,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        /// Alice's input as `alpha,beta` (real); Haar-random per trial if absent.
        #[arg(long)]
        input_a: Option<String>,
        /// Bob's input as `alpha,beta` (real); Haar-random per trial if absent.
        #[arg(long)]
        input_b: Option<String>,
        /// Include the event log of every sampled run.
        #[arg(long)]
        transcript: bool,
    },
    /// Run the probabilistic protocol over non-maximally entangled pairs.
    SimulateProb {
        #[command(flatten)]
        channel: ChannelArgs,
        /// `a1=..,b1=..,a2=..,b2=..`
        #[arg(long, default_value = "a1=0.8,b1=0.6,a2=0.8,b2=0.6")]
        params: String,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long)]
        transcript: bool,
    },
    /// Entanglement-swapping key agreement.
    Keygen {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long, default_value = "true", action = clap::ArgAction::Set)]
        disclose: bool,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        /// Classify all valid channels (basis `+/-`, sign `+`) instead.
        #[arg(long)]
        split: bool,
    },
    /// Derived table, published table and their difference.
    Tables {
        #[arg(long, value_parser = ["1", "3", "4"])]
        which: String,
    },
}

/// What a command produced.
pub struct Report {
    pub command: &'static str,
    pub inputs: Value,
    pub results: Value,
    pub diagnostics: Vec<String>,
    pub text: String,
    pub exit_code: i32,
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema_version: u32,
    command: &'a str,
    seed: u64,
    inputs: &'a Value,
    results: &'a Value,
    diagnostics: &'a [String],
}

/// Failure of a command before it could produce a report.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Internal(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::ConditionViolated
            | Error::InvalidRatio { .. }
            | Error::MaximallyEntangled { .. }
            | Error::NotNormalized { .. }
            | Error::NonFinite
            | Error::InvalidBasis { .. } => CliError::Usage(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

pub fn render(cli: &Cli, report: &Report) -> Result<String, CliError> {
    Ok(match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&Envelope {
                schema_version: SCHEMA_VERSION,
                command: report.command,
                seed: cli.seed,
                inputs: &report.inputs,
                results: &report.results,
                diagnostics: &report.diagnostics,
            })?;
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = report.text.clone();
            for d in &report.diagnostics {
                s.push_str(&format!("note: {d}\n"));
            }
            s
        }
    })
}

pub fn execute(cli: &Cli) -> Result<Report, CliError> {
    commands::dispatch(cli)
}

/// Parses `args`, runs the command, writes to stdout/stderr and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let outcome = execute(&cli).and_then(|r| render(&cli, &r).map(|s| (s, r.exit_code)));
    match outcome {
        Ok((out, code)) => {
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(out.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return EXIT_INTERNAL;
            }
            code
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            EXIT_INTERNAL
        }
    }
}
