//! `spnorm` command-line tool.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spnorm::Error;

use crate::commands::Overrides;
use crate::config::{parse_tests, Bandwidth};

const EXIT_INPUT: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

#[derive(Parser)]
#[command(
    name = "spnorm",
    version,
    about = "Multivariate normality tests for gridded spatial data"
)]
#[command(after_help = "Monte Carlo commands use all cores unless SPNORM_WORKERS is set to a positive count.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a field and write it as CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run normality tests on a field CSV.
    Test {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Field CSV with header ix,iy,var_1,...,var_p.
        #[arg(long)]
        data: Option<PathBuf>,
        #[command(flatten)]
        flags: TestFlags,
    },
    /// Empirical type I error curves.
    Size {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        flags: TestFlags,
    },
    /// Empirical power curves against sinh-arcsinh alternatives.
    Power {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        flags: TestFlags,
    },
    /// Functional boxplot of a curve bundle, or of Mardia moment-drift curves.
    Summarize {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Bundle CSV with header h_star,curve_1,...,curve_m.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct TestFlags {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    alpha: Option<f64>,
    /// Number of random projections for the UIT.
    #[arg(long)]
    projections: Option<usize>,
    /// Bartlett bandwidth: a positive integer or `auto`.
    #[arg(long)]
    bandwidth: Option<Bandwidth>,
    /// Comma-separated subset of UIT,MS,MK,DH.
    #[arg(long)]
    tests: Option<String>,
}

impl TestFlags {
    fn overrides(&self) -> spnorm::Result<Overrides> {
        Ok(Overrides {
            seed: self.seed,
            alpha: self.alpha,
            projections: self.projections,
            bandwidth: self.bandwidth,
            tests: self.tests.as_deref().map(parse_tests).transpose()?,
        })
    }
}

fn run(cli: Cli) -> spnorm::Result<()> {
    match cli.command {
        Command::Simulate { config, seed, out } => commands::simulate(&config, seed, &out),
        Command::Test { config, data, flags } => {
            commands::test(config.as_deref(), data.as_deref(), &flags.overrides()?, &flags.out)
        }
        Command::Size { config, flags } => commands::size(config.as_deref(), &flags.overrides()?, &flags.out),
        Command::Power { config, flags } => commands::power(config.as_deref(), &flags.overrides()?, &flags.out),
        Command::Summarize {
            config,
            data,
            seed,
            out,
        } => commands::summarize(config.as_deref(), data.as_deref(), seed, &out),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Numerical(_) | Error::Degenerate(_) => EXIT_NUMERICAL,
        _ => EXIT_INPUT,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("spnorm: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
