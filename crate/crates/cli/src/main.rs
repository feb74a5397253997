//! `uqn1`: build, verify, classify and export representations of
//! `U_q(u_{n,1})` and its compact part.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 invalid input, 3 I/O.

mod commands;
mod input;
mod matrix_io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "uqn1", version, about = "Representations of U_q(u_{n,1}) on Gel'fand-Tsetlin bases")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count (and optionally list) the patterns with a given top row.
    Enumerate {
        #[command(flatten)]
        common: Common,
        /// Print every pattern with its basis index.
        #[arg(long)]
        list: bool,
    },
    /// Build a representation and summarize its matrices.
    Build(Common),
    /// Check the defining relations; exit 1 when any fails.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Verify matrices previously written by `export` instead.
        #[arg(long, value_name = "PATH")]
        from: Option<PathBuf>,
        /// Check only this many randomly chosen columns (see `--seed`).
        #[arg(long)]
        sample: Option<usize>,
        /// Scale one Cartan entry before checking (negative control).
        #[arg(long)]
        corrupt: bool,
    },
    /// Reducibility case, composition lattice, normal forms and classes.
    Classify {
        #[command(flatten)]
        common: Common,
        /// Print the lattice in Graphviz format instead of JSON.
        #[arg(long)]
        dot: bool,
    },
    /// The intertwiner to the swapped parameters, or its leading term at a
    /// pole.
    Intertwine(Common),
    /// Hermitian form signs against the unitarity classes.
    Unitarity(Common),
    /// Write the generator matrices to `--out`.
    Export(Common),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Triplet,
    Dot,
    Text,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ImUnits {
    Plain,
    /// Imaginary parts of `--c1`/`--c2` are multiples of `pi/2h`.
    #[value(name = "pi2h")]
    Pi2h,
}

#[derive(Args, Clone, Debug)]
pub struct Common {
    /// Rank check: `n` for `U_q(u_{n,1})`, or the weight length when compact.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 1.5)]
    pub q: f64,
    /// Comma-separated non-increasing integers.
    #[arg(long, allow_hyphen_values = true)]
    pub weight: Option<String>,
    /// First principal series parameter, as `a+bi`.
    #[arg(long, allow_hyphen_values = true)]
    pub c1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub c2: Option<String>,
    /// `c1 + c2`, used when `--c2` is absent.
    #[arg(long, allow_hyphen_values = true)]
    pub m0: Option<i64>,
    #[arg(long, value_enum, default_value_t = ImUnits::Plain)]
    pub im_units: ImUnits,
    /// Window half-width around the inducing weight.
    #[arg(long, default_value_t = 6)]
    pub window: u32,
    /// Distance from the window edge below which columns are not checked.
    #[arg(long, default_value_t = 3)]
    pub margin: u32,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    /// A check ran and failed.
    Failed(String),
    Input(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Input(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Failed(m) => write!(f, "verification failed: {m}"),
            CliError::Input(m) => write!(f, "invalid input: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

/// Library errors about the inputs are exit 2, everything else is a failed
/// computation.
impl From<uq_un1::error::Error> for CliError {
    fn from(e: uq_un1::error::Error) -> Self {
        use uq_un1::error::Error::*;
        match e {
            InvalidParameter(_) | InvalidWeight(_) | NonIntegerSum(_) | NonIntegerPoint(_) | EmptyInterior => {
                CliError::Input(e.to_string())
            }
            other => CliError::Failed(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Enumerate { common, list } => commands::enumerate(&common, list),
        Command::Build(common) => commands::build(&common),
        Command::Verify {
            common,
            from,
            sample,
            corrupt,
        } => commands::verify(&common, from.as_deref(), sample, corrupt),
        Command::Classify { common, dot } => commands::classify(&common, dot),
        Command::Intertwine(common) => commands::intertwine(&common),
        Command::Unitarity(common) => commands::unitarity(&common),
        Command::Export(common) => commands::export(&common),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("uqn1: {e}");
            ExitCode::from(e.code())
        }
    }
}
