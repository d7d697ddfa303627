use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use convexalg_cli::{execute, write_tables, InputError};

/// Runs one convexalg pipeline from a JSON configuration and writes a
/// versioned JSON report.
#[derive(Parser, Debug)]
#[command(name = "convexalg", version, about)]
struct Args {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Directory for CSV sample tables.
    #[arg(long)]
    emit_csv: Option<PathBuf>,
    /// Overrides the seed in the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Progress notes on standard error.
    #[arg(long)]
    verbose: bool,
}

fn fail(e: InputError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            return fail(InputError {
                kind: "io".into(),
                message: format!("{}: {e}", args.config.display()),
            })
        }
    };
    let outcome = match execute(&text, args.seed) {
        Ok(o) => o,
        Err(e) => return fail(e),
    };
    let report = &outcome.report;
    if args.verbose {
        eprintln!(
            "command {} seed {} digest {}",
            report.command, report.seed, report.config_digest
        );
    }
    let json = report.to_json();
    let cfg = convexalg_cli::parse_config(&text).expect("parsed above");
    match cfg.output() {
        Some(path) => {
            if let Err(e) = fs::write(path, &json) {
                return fail(InputError {
                    kind: "io".into(),
                    message: format!("{}: {e}", path.display()),
                });
            }
            if args.verbose {
                eprintln!("report written to {}", path.display());
            }
        }
        None => print!("{json}"),
    }
    if let Some(dir) = &args.emit_csv {
        if let Err(e) = write_tables(dir, report.command, &outcome.tables) {
            return fail(e);
        }
        if args.verbose {
            eprintln!("{} table(s) written to {}", outcome.tables.len(), dir.display());
        }
    }
    if let Some(f) = &report.failure {
        eprintln!("{}", serde_json::json!({ "failed": f }));
    }
    ExitCode::from(report.exit_code() as u8)
}
