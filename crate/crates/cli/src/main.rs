//! `oblique`: dispersion curves, perturbation tables, conjecture scans,
//! shallow-water simulations and post-hoc mode analysis.

mod config;
mod conjecture;
mod dispersion;
mod error;
mod modes;
mod output;
mod perturb;
mod simulate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "oblique", version, about = "Oblique viscous instability toolkit")]
struct Cli {
    /// Worker threads for scans and the solver (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every file-emitting command.
#[derive(Debug, Args)]
pub struct Common {
    /// JSON configuration (or a manifest written by an earlier run); flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Growth-rate curves σ(k) of the linearized viscous shallow-water system.
    Dispersion {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: dispersion::Flags,
    },
    /// First-order eigenvalue corrections of A + δC from every method.
    Perturb {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: perturb::Flags,
    },
    /// Four-operator and correction-sign stability criteria against full scans.
    Conjecture {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: conjecture::Flags,
    },
    /// Runs the 2-D viscous shallow-water solver.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: simulate::Flags,
    },
    /// Dominant Fourier mode of a snapshot file.
    Modes {
        /// Snapshot written by `simulate` (.csv or .bin).
        snapshot: PathBuf,
        /// Also write `modes.json` and a manifest here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Dispersion { common, flags } => dispersion::run(&common, &flags),
        Command::Perturb { common, flags } => perturb::run(&common, &flags),
        Command::Conjecture { common, flags } => conjecture::run(&common, &flags),
        Command::Simulate { common, flags } => simulate::run(&common, &flags),
        Command::Modes { snapshot, out } => modes::run(&snapshot, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
