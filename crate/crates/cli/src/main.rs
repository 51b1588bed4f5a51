//! `dirichlet`: solve, energy, verify, recover and relax workflows.
//!
//! Exit codes: 0 success, 1 output failure, 2 invalid input, 3 solver or
//! relaxation did not converge, 4 verification checks failed.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod error;
mod output;

use config::{Overrides, RunConfig};
use error::CliResult;

#[derive(Debug, Parser)]
#[command(name = "dirichlet", version, about = "Discrete potential theory workflows")]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output root; runs land in `<out>/<command>/<name>/`.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Accepted for compatibility. Every reduction already runs in a fixed
    /// sequential order, so outputs are bit-identical across runs.
    #[arg(long, global = true)]
    sequential: bool,

    /// Grid spacing.
    #[arg(long, global = true)]
    h: Option<f64>,

    /// Minimum number of surface panels.
    #[arg(long, global = true)]
    panels: Option<usize>,

    /// Command tolerance: solver residual, verification bound or
    /// relaxation gradient threshold.
    #[arg(long, global = true)]
    tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Solve a discrete Dirichlet problem.
    Solve,
    /// Energies of a volume and surface density.
    Energy,
    /// Run the identity checks at two resolutions.
    Verify,
    /// Recover densities from a potential.
    Recover,
    /// Relax repulsive charges inside a domain.
    Relax,
}

fn run(cli: &Cli) -> CliResult<PathBuf> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    cfg.apply(&Overrides { seed: cli.seed, h: cli.h, panels: cli.panels, tol: cli.tol });
    match cli.command {
        Command::Solve => commands::solve::run(&cfg, &cli.out),
        Command::Energy => commands::energy::run(&cfg, &cli.out),
        Command::Verify => commands::verify::run(&cfg, &cli.out),
        Command::Recover => commands::recover::run(&cfg, &cli.out),
        Command::Relax => commands::relax::run(&cfg, &cli.out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(dir) => {
            println!("{}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
