//! `qbc`: batch front-end for broadcast-channel capacity regions, symmetric
//! rate sums, CVQKD key-rate regions, network reduction and self-checks.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Deserialize;

use crate::output::Format;

/// Exit status of a failed run.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Physical or numerical parameters rejected (exit 2).
    Invalid(String),
    /// Input or config file missing, malformed or non-unitary (exit 3).
    InputFile(String),
    /// A verification check exceeded its tolerance (exit 4).
    Verification(String),
    /// Output could not be written (exit 1).
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::InputFile(_) => 3,
            CliError::Verification(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Invalid(m) | CliError::InputFile(m) | CliError::Verification(m) | CliError::Io(m) => m,
        }
    }
}

impl From<qbc_core::Error> for CliError {
    fn from(e: qbc_core::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "qbc", version, about = "Capacity regions and key rates of pure-loss bosonic broadcast channels")]
struct Cli {
    /// Directory for output files [default: $QBC_OUT_DIR]; without either,
    /// files go to stdout, each preceded by a `# file: <name>` line.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// Table format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Significant digits for printed numbers.
    #[arg(long, global = true, value_parser = clap::value_parser!(u8).range(1..=17))]
    precision: Option<u8>,

    /// JSON file holding a command and its parameters, in place of a
    /// subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Clone, Subcommand, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Capacity constraints for every receiver subset; for two receivers also
    /// the boundary, the time-sharing line and finite-energy boundaries.
    Region(commands::RegionArgs),
    /// Optimal and time-sharing rate sums of the symmetric 1-to-m channel.
    Symmetric(commands::SymmetricArgs),
    /// Key-rate regions of broadcast CVQKD for a list of modulation strengths.
    Qkd(commands::QkdArgs),
    /// Reduce a linear-optical network JSON file to its beam-splitter cascade.
    Decompose(commands::DecomposeArgs),
    /// Run the cross-check suite and emit a JSON report.
    Verify(commands::VerifyArgs),
}

/// Contents of a `--config` file: the command-line flags as JSON keys.
#[derive(Debug, Deserialize)]
struct ConfigFile {
    out_dir: Option<PathBuf>,
    format: Option<Format>,
    precision: Option<u8>,
    #[serde(flatten)]
    command: Command,
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub out_dir: Option<PathBuf>,
    pub format: Format,
    pub digits: usize,
}

const DEFAULT_DIGITS: usize = 9;

/// Default output directory when neither `--out-dir` nor the config sets one.
pub const OUT_DIR_ENV: &str = "QBC_OUT_DIR";

fn resolve(cli: Cli) -> Result<RunConfig, CliError> {
    let file = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::InputFile(format!("{}: {e}", path.display())))?;
            Some(
                serde_json::from_str::<ConfigFile>(&text)
                    .map_err(|e| CliError::InputFile(format!("{}: {e}", path.display())))?,
            )
        }
        None => None,
    };
    let (command, file_out, file_format, file_precision) = match (cli.command, file) {
        (Some(_), Some(_)) => {
            return Err(CliError::Invalid("give either a subcommand or --config, not both".into()));
        }
        (Some(c), None) => (c, None, None, None),
        (None, Some(f)) => (f.command, f.out_dir, f.format, f.precision),
        (None, None) => return Err(CliError::Invalid("no command given; see `qbc --help`".into())),
    };
    let precision = cli.precision.or(file_precision);
    if precision.is_some_and(|p| !(1..=17).contains(&p)) {
        return Err(CliError::Invalid("precision must lie in 1..=17".into()));
    }
    Ok(RunConfig {
        command,
        out_dir: cli.out_dir.or(file_out).or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from)),
        format: cli.format.or(file_format).unwrap_or(Format::Csv),
        digits: precision.map_or(DEFAULT_DIGITS, usize::from),
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = resolve(cli)?;
    let artifacts = commands::execute(&config)?;
    output::emit(&artifacts.files, config.out_dir.as_ref())?;
    match artifacts.failure {
        Some(msg) => Err(CliError::Verification(msg)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qbc: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn config_file_mirrors_flags() {
        let cfg: ConfigFile = serde_json::from_str(
            r#"{"command": "region", "eta": [0.2, 0.3], "n_s": [1.0], "format": "json", "precision": 6}"#,
        )
        .unwrap();
        assert_eq!(cfg.format, Some(Format::Json));
        match cfg.command {
            Command::Region(args) => {
                assert_eq!(args.eta, vec![0.2, 0.3]);
                assert_eq!(args.resolution, commands::RegionArgs::default().resolution);
            }
            other => panic!("{other:?}"),
        }
        let cfg: ConfigFile = serde_json::from_str(r#"{"command": "verify", "quick": true}"#).unwrap();
        assert!(matches!(cfg.command, Command::Verify(commands::VerifyArgs { quick: true, .. })));
    }
}
