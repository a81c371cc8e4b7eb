use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mfg_cli::run::Progress;
use mfg_cli::{execute, write_outputs, RunConfig};
use mfg_core::NoSink;

#[derive(Parser)]
#[command(name = "mfg", version, about = "Finite-state mean-field game experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a config and write trajectory.csv, convergence.csv and summary.json.
    Run {
        config: PathBuf,
        /// Output directory; overrides `output_dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        quiet: bool,
    },
    /// Validate a config without running it.
    Check { config: PathBuf },
}

const CONVERGED: u8 = 0;
const FAILED: u8 = 1;
const NOT_CONVERGED: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check { config } => match RunConfig::from_path(&config).and_then(|c| c.plan()) {
            Ok(_) => {
                println!("{}: ok", config.display());
                ExitCode::from(CONVERGED)
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(FAILED)
            }
        },
        Command::Run { config, out, quiet } => match run(&config, out, quiet) {
            Ok(true) => ExitCode::from(CONVERGED),
            Ok(false) => ExitCode::from(NOT_CONVERGED),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(FAILED)
            }
        },
    }
}

fn run(path: &Path, out: Option<PathBuf>, quiet: bool) -> mfg_cli::Result<bool> {
    let config = RunConfig::from_path(path)?;
    let plan = config.plan()?;
    let dir = out
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let outcome = if quiet {
        execute(&plan, &mut NoSink)?
    } else {
        let every = (config.flow.max_iters / 20).max(1);
        execute(&plan, &mut Progress { every })?
    };
    write_outputs(&outcome, &dir)?;
    if !quiet {
        let s = &outcome.summary;
        println!(
            "{} after {} iterations (residual {:.3e}); outputs in {}",
            if s.converged { "converged" } else { "not converged" },
            s.iters,
            s.final_residual,
            dir.display()
        );
    }
    Ok(outcome.summary.converged)
}
