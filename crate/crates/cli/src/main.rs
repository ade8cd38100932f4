mod args;
mod output;
mod run;
mod summary;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, ExperimentConfig};
use run::Context;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] recurlab::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 1 for failed or inconclusive certificates, 2 for bad input, 3 for
    /// exceeded caps.
    fn exit_code(&self) -> u8 {
        use recurlab::Error as E;
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Core(E::InvalidInput(_) | E::Parse { .. }) => 2,
            CliError::Core(E::Capacity(_)) => 3,
            CliError::Core(E::Inconclusive(_) | E::Consistency(_) | E::ZeroProbability(_)) => 1,
        }
    }
}

fn load_config(cli: Cli) -> Result<ExperimentConfig, CliError> {
    match (cli.config, cli.command) {
        (Some(_), Some(_)) => Err(CliError::Config("give either --config or a subcommand, not both".into())),
        (None, None) => Err(CliError::Config("no subcommand given; see --help".into())),
        (Some(path), None) => {
            let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
        }
        (None, Some(command)) => Ok(ExperimentConfig {
            out_dir: cli.out_dir,
            seed: cli.seed,
            threads: cli.threads,
            precision: cli.precision,
            tolerance: cli.tolerance,
            command,
        }),
    }
}

fn validate(cfg: &ExperimentConfig) -> Result<(), CliError> {
    if !(cfg.tolerance.is_finite() && cfg.tolerance > 0.0) {
        return Err(CliError::Config(format!("tolerance must be positive, got {}", cfg.tolerance)));
    }
    if !(16..=4096).contains(&cfg.precision) {
        return Err(CliError::Config(format!("precision must be in 16..=4096, got {}", cfg.precision)));
    }
    if cfg.threads == Some(0) {
        return Err(CliError::Config("threads must be positive".into()));
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<bool, CliError> {
    let cfg = load_config(cli)?;
    validate(&cfg)?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let ctx = Context {
        out_dir: &cfg.out_dir,
        seed: cfg.seed,
        precision: cfg.precision,
        tolerance: cfg.tolerance,
    };
    run::run(&cfg.command, &ctx)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
