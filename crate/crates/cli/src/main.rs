use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nlpb_cli::runner::{output_path, VERSION};
use nlpb_cli::{list_checks, render_table, run, CliError, RunOptions, Scenario, EXIT_CONFIG, EXIT_FAIL, EXIT_PASS};

#[derive(Parser)]
#[command(name = "nlpb", about = "Residual checks for deformed ladder operators on a truncated space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and report every check.
    Run {
        scenario: PathBuf,
        /// Write the JSON report here (overrides the scenario's `output`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed for randomized trials (overrides the scenario's `seed`).
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads for independent checks.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Print the check catalog as JSON.
    ListChecks,
    /// Print the version.
    Version,
}

// A closed pipe (`nlpb run ... | head`) must not turn a verdict into a panic.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn exit(code: i32) -> ExitCode {
    ExitCode::from(code as u8)
}

fn run_command(path: PathBuf, out: Option<PathBuf>, seed: Option<u64>, jobs: Option<usize>) -> Result<bool, CliError> {
    let scenario = Scenario::from_path(&path)?;
    let report = run(&scenario, &RunOptions { seed, jobs })?;
    emit(&render_table(&report));
    match output_path(&scenario, &path, out.as_deref()) {
        Some(target) => {
            if let Some(dir) = target.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| CliError::Write {
                    path: target.display().to_string(),
                    reason: e.to_string(),
                })?;
            }
            std::fs::write(&target, report.to_json()).map_err(|e| CliError::Write {
                path: target.display().to_string(),
                reason: e.to_string(),
            })?;
            emit(&format!("report: {}\n", target.display()));
        }
        None => emit(&report.to_json()),
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { scenario, out, seed, jobs } => match run_command(scenario, out, seed, jobs) {
            Ok(true) => exit(EXIT_PASS),
            Ok(false) => exit(EXIT_FAIL),
            Err(e) => {
                eprintln!("error: {e}");
                exit(EXIT_CONFIG)
            }
        },
        Command::ListChecks => {
            emit(&list_checks());
            exit(EXIT_PASS)
        }
        Command::Version => {
            emit(&format!("nlpb {VERSION}\n"));
            exit(EXIT_PASS)
        }
    }
}
