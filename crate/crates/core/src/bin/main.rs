use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use finalg::cli::{run_document, RunOptions};
use finalg::dsl::{parse, COMMANDS};

#[derive(Parser)]
#[command(name = "finalg", version, about = "Exact computations with finite-dimensional DG algebras")]
struct Cli {
    #[command(subcommand)]
    action: Action,
}

#[derive(Subcommand)]
enum Action {
    /// Run the commands of a workspace file.
    Run {
        file: PathBuf,
        /// Run only this command.
        #[arg(long = "cmd", value_name = "NAME", value_parser = clap::builder::PossibleValuesParser::new(COMMANDS))]
        cmd: Option<String>,
        /// Also write the report as JSON to this file.
        #[arg(long, value_name = "OUT")]
        json: Option<PathBuf>,
        /// Truncation bound for resolutions.
        #[arg(long, value_name = "N")]
        bound: Option<usize>,
        /// Run independent commands concurrently.
        #[arg(long)]
        parallel: bool,
        /// Record wall time per command.
        #[arg(long)]
        timing: bool,
    },
    /// Print the canonical form of a workspace file.
    Fmt { file: PathBuf },
}

fn read(file: &PathBuf) -> Result<String, ExitCode> {
    std::fs::read_to_string(file).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", file.display());
        ExitCode::from(2)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.action {
        Action::Fmt { file } => {
            let src = match read(&file) {
                Ok(s) => s,
                Err(code) => return code,
            };
            match parse(&src) {
                Ok(doc) => {
                    print!("{doc}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("{}:{e}", file.display());
                    ExitCode::from(2)
                }
            }
        }
        Action::Run { file, cmd, json, bound, parallel, timing } => {
            let src = match read(&file) {
                Ok(s) => s,
                Err(code) => return code,
            };
            let doc = match parse(&src) {
                Ok(d) => d,
                Err(e) => {
                    eprintln!("{}:{e}", file.display());
                    return ExitCode::from(2);
                }
            };
            let seed_override = match std::env::var("FINALG_SEED") {
                Ok(s) => match s.trim().parse::<u64>() {
                    Ok(v) => Some(v),
                    Err(_) => {
                        eprintln!("error: FINALG_SEED must be an unsigned integer, got `{s}`");
                        return ExitCode::from(2);
                    }
                },
                Err(_) => None,
            };
            let opts = RunOptions { seed_override, bound, parallel, timing, only: cmd };
            let report = run_document(&doc, &opts);
            print!("{}", report.to_text());
            if let Some(path) = json {
                if let Err(e) = std::fs::write(&path, report.to_json() + "\n") {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            }
            if report.is_ok() {
                ExitCode::SUCCESS
            } else {
                for r in report.results.iter().filter(|r| !r.ok) {
                    eprintln!("error: {} {}: {}", r.command, r.target.as_deref().unwrap_or(""), r.error.as_deref().unwrap_or(""));
                }
                ExitCode::from(1)
            }
        }
    }
}
