//! `nodal`: spectra, nodal counts and bound checks for graph files.
//!
//! Exit codes: 0 success, 2 input error, 3 numerical failure, 4 model
//! mismatch (wrong graph kind for the command, or a cycle where a tree is
//! needed).

mod commands;

use std::fmt::Display;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nodal_core::io::Report;
use nodal_core::Tolerances;

#[derive(Parser)]
#[command(name = "nodal", version, about = "Nodal domain counts of Schrödinger operators on graphs")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Relative gap below which two eigenvalues count as one repeated
    /// eigenvalue [default: 1e-8, or the ensemble configuration's value].
    #[arg(long, global = true)]
    gap_tol: Option<f64>,
    /// Relative size below which an eigenfunction counts as vanishing at a
    /// vertex [default: 1e-8, or the ensemble configuration's value].
    #[arg(long, global = true)]
    vanish_tol: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Discrete,
    Metric,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum OffsetArg {
    Below,
    Above,
}

#[derive(Args)]
pub struct SpectrumArgs {
    /// Graph file.
    file: PathBuf,
    /// Expected graph kind; defaults to the kind declared in the file.
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    /// Number of eigenvalues (metric default 10, discrete default all).
    #[arg(long, conflicts_with = "kmax")]
    count: Option<usize>,
    /// Metric only: all eigenvalues with k = √λ below this value.
    #[arg(long)]
    kmax: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues with genericity flags.
    Spectrum(SpectrumArgs),
    /// Nodal counts with the verdicts n − ℓ ≤ ν ≤ n.
    Nodal(SpectrumArgs),
    /// Riccati variables on a discrete tree.
    Riccati {
        file: PathBuf,
        /// Evaluate every R_v at this spectral parameter.
        #[arg(long, allow_negative_numbers = true, required_unless_present = "scan", conflicts_with = "scan")]
        lambda: Option<f64>,
        /// Locate the eigenvalues in [A, B] and count their nodal domains.
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
        scan: Option<Vec<f64>>,
        /// Root vertex, as labelled in the file (1-indexed).
        #[arg(long, default_value_t = 1)]
        root: usize,
    },
    /// The star graph whose eigenfunction at k = mπ vanishes at the centre.
    Counterexample {
        #[arg(long)]
        m: usize,
        /// Number of edges.
        #[arg(long = "N")]
        edges: usize,
        /// Side of 1 on which the incommensurable lengths lie.
        #[arg(long, value_enum, default_value_t = OffsetArg::Below)]
        offset: OffsetArg,
    },
    /// Seeded random ensemble from a TOML configuration.
    Ensemble {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the seed in the configuration.
        #[arg(long, env = "NODAL_SEED")]
        seed: Option<u64>,
    },
}

pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn input(e: impl Display) -> Self {
        Failure { code: 2, message: e.to_string() }
    }

    pub fn numeric(e: impl Display) -> Self {
        Failure { code: 3, message: e.to_string() }
    }

    pub fn mismatch(e: impl Display) -> Self {
        Failure { code: 4, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = (cli.common.gap_tol, cli.common.vanish_tol);
    let tol = commands::apply(Tolerances::default(), overrides);
    let result: Result<Report, Failure> = if !(tol.gap_rel >= 0.0 && tol.vanish_rel >= 0.0) {
        Err(Failure::input("tolerances must be non-negative"))
    } else {
        match cli.command {
            Command::Spectrum(a) => commands::spectrum(&a, &tol),
            Command::Nodal(a) => commands::nodal(&a, &tol),
            Command::Riccati { file, lambda, scan, root } => commands::riccati(&file, lambda, scan, root),
            Command::Counterexample { m, edges, offset } => commands::counterexample(m, edges, offset, &tol),
            Command::Ensemble { config, seed } => commands::ensemble(&config, seed, overrides),
        }
    };
    match result {
        Ok(report) => {
            let out = match cli.common.format {
                Format::Text => report.to_text(),
                Format::Json => report.to_json(),
            };
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("nodal: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
