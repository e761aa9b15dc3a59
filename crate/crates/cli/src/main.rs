use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use tdcrack_cli::experiment::{compute, preset, write_artifacts, write_summary, PRESET_NAMES};
use tdcrack_cli::ExperimentConfig;

const THREADS_VAR: &str = "TDCRACK_THREADS";

/// Topological-derivative imaging of short cracks in a disk.
#[derive(Parser)]
#[command(name = "tdcrack", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a configuration file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run one of the built-in examples, or write its configuration.
    Preset {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(PRESET_NAMES))]
        name: String,
        /// Write the preset configuration to FILE instead of running it.
        #[arg(long, value_name = "FILE")]
        emit_config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run a configuration over a list of permittivity ratios.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated ratios ε_a/ε_b.
        #[arg(long, value_delimiter = ',', required = true)]
        epsilon_ratios: Vec<f64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .with_context(|| format!("{THREADS_VAR} must be a positive integer, got `{value}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("cannot configure the thread pool")?;
    Ok(())
}

fn execute(config: &ExperimentConfig, out: &Path) -> Result<()> {
    let experiment = compute(config)?;
    let written = write_artifacts(config, &experiment, out)?;
    eprintln!("wrote {} files to {}", written.len(), out.display());
    write_summary(std::io::stdout().lock(), config, &experiment)?;
    Ok(())
}

fn main_inner() -> Result<()> {
    let cli = Cli::parse();
    configure_threads()?;
    match cli.command {
        Command::Run { config, out } => execute(&ExperimentConfig::load(&config)?, &out),
        Command::Preset {
            name,
            emit_config,
            out,
        } => {
            let config = preset(&name)?;
            match emit_config {
                Some(path) => std::fs::write(&path, config.to_string())
                    .with_context(|| format!("cannot write {}", path.display())),
                None => execute(&config, &out),
            }
        }
        Command::Sweep {
            config,
            epsilon_ratios,
            out,
        } => {
            if epsilon_ratios.is_empty() {
                bail!("--epsilon-ratios needs at least one value");
            }
            let mut config = ExperimentConfig::load(&config)?;
            config.epsilon_ratios = epsilon_ratios;
            config.validate()?;
            execute(&config, &out)
        }
    }
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = format!("{e:#}").replace('\n', " ");
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
