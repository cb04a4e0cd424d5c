//! Command-line front end: reads a JSON run configuration, runs one check and
//! writes a JSON report.
//!
//! Exit codes: 0 pass, 1 fail with witnesses, 2 usage or config error,
//! 3 contract violation by a user-supplied norm or map.

pub mod commands;
pub mod config;
pub mod error;
pub mod json;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;

pub use commands::{execute, Command, Details, ReportDoc, RunOptions};
pub use config::Config;
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "fuzzynorm", version, about = "Checks for fuzzy normed spaces and fuzzy isometries")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration. Optional for verify-witness, which falls back
    /// to the configuration echoed in the report.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// find-midpoint: fail when more than one solution is found.
    #[arg(long, global = true)]
    pub require_unique: bool,
    /// Override the plan seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// verify-witness: report whose witnesses are replayed.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
}

pub fn load_report(path: &Path) -> Result<ReportDoc, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

/// Writes via a sibling temp file and a rename so readers never see a
/// partial report.
pub fn write_atomically(path: &Path, contents: &str) -> Result<(), CliError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn run_cli(cli: &Cli) -> Result<ReportDoc, CliError> {
    let source_report = cli.report.as_deref().map(load_report).transpose()?;
    let mut config = match (&cli.config, &source_report) {
        (Some(path), _) => Config::load(path)?,
        (None, Some(report)) if cli.command == Command::VerifyWitness => report.config_echo.clone(),
        _ => return Err(CliError::config("--config is required")),
    };
    if let Some(seed) = cli.seed {
        config.plan.seed = seed;
    }
    let opts = RunOptions {
        require_unique: cli.require_unique,
        source_report,
    };
    let doc = execute(cli.command, &config, &opts)?;
    let text = json::to_string(&doc).map_err(|e| CliError::config(format!("cannot serialize report: {e}")))?;
    match &cli.out {
        Some(path) => write_atomically(path, &text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(doc)
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run_cli(&cli) {
        Ok(doc) => {
            eprint!("{}", doc.summary());
            doc.exit_code()
        }
        Err(e) => {
            eprintln!("fuzzynorm: {e}");
            e.exit_code()
        }
    }
}
