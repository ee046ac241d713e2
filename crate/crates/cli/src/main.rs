use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use sphereprod_cli::commands::{cmd_sweep, cmd_table, cmd_verify, load_config};
use sphereprod_cli::output::identities_to_table;

#[derive(Parser)]
#[command(
    name = "sphereprod",
    version,
    about = "Verify induced almost product structures on spheres and products of spheres"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification suites and write JSON/CSV reports.
    Verify {
        /// Path to the JSON run configuration.
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the structure data at one point, closed form vs oracle.
    Table {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated point coordinates (length 2p+q).
        #[arg(long)]
        point: String,
    },
    /// Vary one parameter over a grid and write per-cell summaries.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Parameter to vary: R, r, r1, r2, r3 or sign (family-dependent).
        #[arg(long)]
        param: String,
        /// Comma-separated grid values.
        #[arg(long)]
        grid: String,
    },
}

const EXIT_PASS: u8 = 0;
const EXIT_RESIDUAL_FAILURE: u8 = 1;
const EXIT_CONFIG_ERROR: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_PASS,
                _ => EXIT_CONFIG_ERROR,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(pass) => {
            if pass {
                ExitCode::from(EXIT_PASS)
            } else {
                ExitCode::from(EXIT_RESIDUAL_FAILURE)
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(EXIT_CONFIG_ERROR)
        }
    }
}

fn run(cli: Cli) -> Result<bool, sphereprod_cli::CliError> {
    match cli.command {
        Command::Verify { config } => {
            let config = load_config(&config)?;
            let outcome = cmd_verify(&config)?;
            print!("{}", identities_to_table(&outcome.full.report.identities));
            let summary = &outcome.full.normality_summary;
            println!(
                "normality sweep: {} points used, {} skipped, min |det(I-a^2)| = {}",
                summary.points_used,
                summary.points_skipped,
                summary
                    .min_abs_det_i_minus_a_sq
                    .map(|d| format!("{d:.6}"))
                    .unwrap_or_else(|| "-".to_string())
            );
            if let Some(path) = &config.output.json {
                println!("report written to {}", path.display());
            }
            if let Some(path) = &config.output.csv {
                println!("summary written to {}", path.display());
            }
            println!("overall: {}", if outcome.full.pass() { "pass" } else { "FAIL" });
            Ok(outcome.full.pass())
        }
        Command::Table { config, point } => {
            let config = load_config(&config)?;
            let outcome = cmd_table(&config, &point)?;
            print!("{}", outcome.rendered);
            Ok(true)
        }
        Command::Sweep {
            config,
            param,
            grid,
        } => {
            let config = load_config(&config)?;
            let outcome = cmd_sweep(&config, &param, &grid)?;
            println!(
                "{:<8} {:>10} {:>6} {:>13} {:>13} {:>13}",
                "param", "value", "pass", "max_algebraic", "normality", "min_det"
            );
            for cell in &outcome.cells {
                println!(
                    "{:<8} {:>10} {:>6} {:>13.4e} {:>13.4e} {:>13}",
                    cell.param,
                    cell.value,
                    if cell.pass { "pass" } else { "FAIL" },
                    cell.max_algebraic,
                    cell.normality,
                    cell.min_abs_det_i_minus_a_sq
                        .map(|d| format!("{d:.4}"))
                        .unwrap_or_else(|| "-".to_string()),
                );
            }
            if let Some(path) = &config.output.json {
                println!("cells written to {}", path.display());
            }
            Ok(outcome.pass())
        }
    }
}
