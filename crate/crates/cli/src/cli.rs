//! Command-line front end: subcommand and flag parsing, config loading, CSV
//! output, exit codes.
//!
//! Exit codes: 0 on success, 1 for configuration/parse/I/O problems (message
//! on standard error), 2 for numerical failure (a divergence-dominated run).

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::experiments;
use crate::report::RateReport;

#[derive(Parser, Debug)]
#[command(
    name = "roughpath",
    about = "Convergence studies for differential equations driven by lifted paths",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// CSV output path (overrides the config's `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base seed (overrides the config's `seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Suppress the summary line on standard output.
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Wong–Zakai approximation rates along linear interpolations.
    Wz(RunArgs),
    /// Good-sequence diagnostics of dyadic approximations.
    Goodseq(RunArgs),
    /// Pointwise second-level L² rate over [0, 1].
    Levyrate(RunArgs),
    /// Skeleton consistency along finite-energy paths.
    Support(RunArgs),
    /// Rate function of a configured piecewise-linear path.
    Ratefn(RunArgs),
    /// Anticipating scenario demonstration with Stratonovich residuals.
    Antidemo(RunArgs),
}

impl Command {
    fn token(&self) -> &'static str {
        match self {
            Command::Wz(_) => "wz",
            Command::Goodseq(_) => "goodseq",
            Command::Levyrate(_) => "levyrate",
            Command::Support(_) => "support",
            Command::Ratefn(_) => "ratefn",
            Command::Antidemo(_) => "antidemo",
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::Wz(a)
            | Command::Goodseq(a)
            | Command::Levyrate(a)
            | Command::Support(a)
            | Command::Ratefn(a)
            | Command::Antidemo(a) => a,
        }
    }
}

/// Inserts `_summary` before the extension: `runs/wz.csv` → `runs/wz_summary.csv`.
fn summary_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let mut name = format!("{stem}_summary");
    if let Some(ext) = out.extension().and_then(|s| s.to_str()) {
        name.push('.');
        name.push_str(ext);
    }
    out.with_file_name(name)
}

fn load_config(token: &str, args: &RunArgs) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if cfg.experiment.is_empty() {
        cfg.experiment = token.to_string();
        cfg.fill_defaults();
    }
    if cfg.experiment != token {
        return Err(CliError::Config(format!(
            "config is for experiment `{}` but the `{token}` subcommand was invoked",
            cfg.experiment
        )));
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.out = Some(out.display().to_string());
    }
    if cfg.out.is_none() {
        cfg.out = Some(format!("{token}.csv"));
    }
    Ok(cfg)
}

fn write_outputs(report: &RateReport) -> Result<PathBuf> {
    let out = PathBuf::from(report.config.out.as_deref().unwrap_or("out.csv"));
    if let Some(dir) = out.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(&out, report.csv_rows())?;
    std::fs::write(summary_path(&out), report.csv_summary())?;
    Ok(out)
}

fn execute(token: &str, args: &RunArgs) -> Result<String> {
    let cfg = load_config(token, args)?;
    let report = experiments::run_experiment(&cfg)?;
    if report.divergence_fraction() > 0.10 {
        return Err(CliError::Numerical(format!(
            "{} of {} replicates diverged",
            report.divergent, report.attempted
        )));
    }
    let out = write_outputs(&report)?;
    if token == "ratefn" {
        // the computed value is the point of this subcommand
        return Ok(format!("{}", report.rows[0].value));
    }
    let mut line = report.summary_line();
    line.push_str(&format!(" -> {}", out.display()));
    for note in &report.notes {
        line.push_str(&format!("\nnote: {note}"));
    }
    Ok(line)
}

/// Runs the CLI on the given argument vector and returns the process exit
/// code. Output goes to standard out/err as usual.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not errors
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    eprint!("{e}");
                    1
                }
            };
        }
    };
    let args = cli.command.args().clone();
    match execute(cli.command.token(), &args) {
        Ok(line) => {
            if !args.quiet {
                println!("{line}");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_path_inserts_suffix() {
        assert_eq!(summary_path(Path::new("runs/wz.csv")), PathBuf::from("runs/wz_summary.csv"));
        assert_eq!(summary_path(Path::new("plain")), PathBuf::from("plain_summary"));
    }
}
