use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::LevelFilter;

mod artifacts;
mod commands;
mod config;
mod error;

use config::RunConfig;
use error::CliError;

/// Numerical experiments on outward cuspidal domains.
#[derive(Debug, Parser)]
#[command(name = "ncusp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory; overrides `output` in the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Solver seed; overrides `solver.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Derived exponents and embedding ranges.
    Exponents,
    /// Jacobian, area-formula and volume checks for the straightening map.
    VerifyGeometry,
    /// Scaling slopes of the cutoff test family and the sharpness table.
    Scaling,
    /// First Steklov eigenpair and trace constant.
    Solve,
    /// Descent solver against the linear eigenvalue oracle (p = q = 2).
    OracleCheck,
    /// Generate and export the graded mesh.
    Mesh,
}

fn init_logging() {
    let level = match std::env::var("NCUSP_LOG").as_deref() {
        Ok("quiet") => LevelFilter::Off,
        Ok("info") => LevelFilter::Info,
        Ok("debug") => LevelFilter::Debug,
        _ => LevelFilter::Warn,
    };
    env_logger::Builder::new().filter_level(level).init();
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let path = cli.config.ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    let mut config = RunConfig::load(&path)?;
    if let Some(out) = cli.out {
        config.output = out;
    }
    if let Some(seed) = cli.seed {
        config.solver.seed = seed;
    }
    match cli.command {
        Command::Exponents => commands::exponents(config),
        Command::VerifyGeometry => commands::verify_geometry(config),
        Command::Scaling => commands::scaling(config),
        Command::Solve => commands::solve(config),
        Command::OracleCheck => commands::oracle_check(config),
        Command::Mesh => commands::mesh(config),
    }
}

fn main() -> ExitCode {
    init_logging();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
