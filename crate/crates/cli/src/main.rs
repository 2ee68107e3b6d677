mod commands;
mod jobs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use siegel_core::Error;

/// Exact arithmetic for p-adic interpolation of half-integral weight Siegel modular forms.
#[derive(Parser, Debug)]
#[command(name = "siegel", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// The prime p.
    #[arg(long)]
    pub p: Option<u64>,
    /// Degree n.
    #[arg(long, default_value_t = 1)]
    pub degree: usize,
    /// Trace bound, or the conductor exponent bound for `interpolate`.
    #[arg(long)]
    pub bound: Option<i64>,
    /// p-adic precision N.
    #[arg(long, default_value_t = 2)]
    pub precision: u32,
    /// Input files.
    #[arg(long = "in", num_args = 1..)]
    pub inputs: Vec<PathBuf>,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hecke polynomial identities: vanishing sum, symmetry and factorisation.
    HeckeVerify {
        #[command(flatten)]
        common: Common,
    },
    /// p-stabilisation of an eigenform and the U_p eigen check.
    Pstab {
        #[command(flatten)]
        common: Common,
        /// Satake parameter for generated degree one data (ignored with --in).
        #[arg(long, default_value = "2")]
        lambda: String,
        /// Twice the weight for generated data.
        #[arg(long, default_value_t = 13)]
        weight2: i64,
    },
    /// Numeric check of the theta transformation formula in degree one.
    ThetaCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_values_t = vec![3u64, 5])]
        conductors: Vec<u64>,
        #[arg(long, default_value_t = 1)]
        tau: i64,
        /// Points as re:im, comma separated.
        #[arg(long, value_delimiter = ',')]
        points: Vec<String>,
    },
    /// Kummer congruences for the measure attached to local polynomials.
    Kummer {
        #[command(flatten)]
        common: Common,
        /// Largest power [m] in the test functions; defaults to p + 1.
        #[arg(long)]
        mmax: Option<u32>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
    /// Interpolation values from a job file.
    Interpolate {
        #[command(flatten)]
        common: Common,
    },
    /// GL_n(Z)-classes of positive definite half-integral matrices up to a trace bound.
    Enumerate {
        #[command(flatten)]
        common: Common,
    },
}

/// What a command produced: a table for people, JSON for machines.
pub struct Report {
    pub table: String,
    pub json: serde_json::Value,
    pub exit: u8,
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Load(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Load(_) => 5,
            CliError::Core(e) => match e {
                Error::UnsupportedDegree(_) => 2,
                Error::PDividesLevel(_) => 3,
                Error::ConstantTermPresent(_)
                | Error::BadConstantTerm(_)
                | Error::BadPrime(_)
                | Error::IncompatibleSystem { .. }
                | Error::Input(_)
                | Error::InvalidMatrix(_) => 5,
                _ => 1,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Load(s) => write!(f, "{s}"),
        }
    }
}

fn run(cli: Cli) -> Result<(Report, Option<PathBuf>), CliError> {
    Ok(match cli.command {
        Command::HeckeVerify { common } => (commands::hecke_verify(&common)?, common.out),
        Command::Pstab { common, lambda, weight2 } => (commands::pstab(&common, &lambda, weight2)?, common.out),
        Command::ThetaCheck { common, conductors, tau, points } => {
            (commands::theta_check(&common, &conductors, tau, &points)?, common.out)
        }
        Command::Kummer { common, mmax, trials } => (commands::kummer(&common, mmax, trials)?, common.out),
        Command::Interpolate { common } => (commands::interpolate(&common)?, common.out),
        Command::Enumerate { common } => (commands::enumerate(&common)?, common.out),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((report, out)) => {
            print!("{}", report.table);
            if let Some(path) = out {
                let text = serde_json::to_string_pretty(&report.json).expect("serialisable report") + "\n";
                if let Err(e) = std::fs::write(&path, text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            }
            ExitCode::from(report.exit)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
