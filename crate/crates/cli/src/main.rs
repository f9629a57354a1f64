use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hems_core::io::{export_compare, export_results, parse_scenario};
use hems_core::{compare, run_baseline, run_scheduled, Error, Mode, Scenario};

/// Household demand-response scheduler: batch runs and a live session service.
#[derive(Parser)]
#[command(name = "hems", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one day in a single mode and write its artifacts
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_parser = parse_mode)]
        mode: Mode,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run baseline and scheduled modes and write both artifact sets plus a comparison
    Compare {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Parse and validate a scenario file
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Start the HTTP session service
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Scenario to open as an initial session
        #[arg(long)]
        scenario: Option<PathBuf>,
    },
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
        .map_err(|_| format!("expected `baseline` or `scheduled`, got `{s}`"))
}

enum Failure {
    Validation(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Csv(_) => Failure::Io(e.to_string()),
            other => Failure::Validation(other.to_string()),
        }
    }
}

fn load(path: &Path) -> Result<Scenario, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    parse_scenario(&text).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))
}

fn execute(command: Command) -> Result<String, Failure> {
    match command {
        Command::Run {
            scenario,
            mode,
            out,
        } => {
            let s = load(&scenario)?;
            let day = match mode {
                Mode::Baseline => run_baseline(&s)?,
                Mode::Scheduled => run_scheduled(&s)?,
            };
            export_results(&day, None, &out)?;
            let r = &day.report;
            Ok(format!(
                "{} {}: total_cost={:.4} penalty={:.4} peak_kw={:.4}",
                s.name,
                mode_name(mode),
                r.total_cost,
                r.penalty_total,
                r.peak_kw
            ))
        }
        Command::Compare { scenario, out } => {
            let s = load(&scenario)?;
            let result = compare(&s)?;
            export_compare(&result, &out)?;
            Ok(format!(
                "{}: total_cost={:.4} baseline={:.4} savings={:.2}% peak_reduction={:.2}%",
                s.name,
                result.scheduled.report.total_cost,
                result.baseline.report.total_cost,
                result.comparison.savings_percent,
                result.comparison.peak_reduction_percent
            ))
        }
        Command::Validate { scenario } => {
            let s = load(&scenario)?;
            Ok(format!(
                "{}: ok ({} appliances, {} requests)",
                s.name,
                s.appliances.len(),
                s.requests.len()
            ))
        }
        Command::Serve { port, scenario } => {
            let state = hems_service::AppState::new();
            if let Some(path) = scenario {
                let id = state.create_session(load(&path)?)?;
                println!("session {id}");
            }
            let addr = std::net::SocketAddr::from(([127, 0, 0, 1], port));
            eprintln!("listening on http://{addr}");
            let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Io(e.to_string()))?;
            runtime
                .block_on(hems_service::serve(state, addr))
                .map_err(|e| Failure::Io(format!("{addr}: {e}")))?;
            Ok("server stopped".into())
        }
    }
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Baseline => "baseline",
        Mode::Scheduled => "scheduled",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli.command) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(Failure::Validation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
