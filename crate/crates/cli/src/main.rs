//! `diraclab`: model spectra, index densities, cylinder oracles and family
//! Chern numbers from the command line.
//!
//! Exit status: 0 on success, 1 when a verification fails, 2 on bad input.

mod commands;
mod config;
mod output;

use anyhow::{bail, Result};
use clap::Parser;
use commands::Outcome;
use config::{load_config, Command, Params};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "diraclab", version, about = "Dirac boundary problems: spectra, index densities and oracles")]
struct Cli {
    /// model | density | index | isospectral | family | validate
    command: Option<Command>,
    /// JSON file with default parameters; flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    params: Params,
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("DIRACLAB_THREADS") {
        let n: usize = match v.trim().parse() {
            Ok(n) if n > 0 => n,
            _ => bail!("DIRACLAB_THREADS must be a positive integer, got '{v}'"),
        };
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<Outcome> {
    configure_threads()?;
    let (command, params) = match &cli.config {
        Some(path) => {
            let file = load_config(path)?;
            (cli.command.or(file.command), cli.params.merged_over(file.params))
        }
        None => (cli.command, cli.params),
    };
    let Some(command) = command else {
        bail!("no command given (model, density, index, isospectral, family, validate)");
    };
    match command {
        Command::Model => commands::model(&params),
        Command::Density => commands::density(&params),
        Command::Index => commands::index(&params),
        Command::Isospectral => commands::isospectral(&params),
        Command::Family => commands::family(&params),
        Command::Validate => commands::validate(&params),
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
    match run(cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Mismatch) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
