mod commands;
mod config;
mod error;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::config::{CommonArgs, OutputFormat, RunConfig};
use crate::error::{Result, EXIT_OTHER};

/// Two-group discriminant analysis for bank-distress early warning.
#[derive(Debug, Parser)]
#[command(name = "distress-lda", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Average, normalize, and fit the training panel; optionally write the model.
    Fit,
    /// Collinearity, Wilks' Lambda, Box's M, and canonical summary of a model.
    Diagnose,
    /// Score and zone every bank-year of a panel.
    Classify,
    /// Yearly zone counts, hits, and error rates against actual labels.
    Evaluate,
}

fn emit<R: Serialize>(format: OutputFormat, report: &R, text: impl FnOnce(&R) -> String) -> String {
    match format {
        OutputFormat::Json => {
            serde_json::to_string_pretty(report).expect("reports serialize") + "\n"
        }
        OutputFormat::Text => text(report),
    }
}

fn run(cli: &Cli) -> Result<String> {
    let cfg = RunConfig::resolve(&cli.common)?;
    Ok(match cli.command {
        Command::Fit => emit(cfg.format, &commands::cmd_fit(&cfg)?, report::render_fit),
        Command::Diagnose => emit(
            cfg.format,
            &commands::cmd_diagnose(&cfg)?,
            report::render_diagnose,
        ),
        Command::Classify => emit(
            cfg.format,
            &commands::cmd_classify(&cfg)?,
            report::render_classify,
        ),
        Command::Evaluate => emit(
            cfg.format,
            &commands::cmd_evaluate(&cfg)?,
            report::render_evaluate,
        ),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(out.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(EXIT_OTHER);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
