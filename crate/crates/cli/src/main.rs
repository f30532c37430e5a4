mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;
use serde::Serialize;

use commands::Command;
use output::Format;

/// Simulation and verification experiments for Levy processes time-changed
/// by inverse stable subordinators.
///
/// Exit codes: 0 success, 1 usage error, 2 numeric failure, 3 a check
/// subcommand found disagreement beyond tolerance.
#[derive(Debug, Parser, Serialize)]
#[command(name = "invsub", version)]
struct Cli {
    /// Base seed; path i always uses stream i of this seed.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads (never changes results).
    #[arg(long, global = true, env = "INVSUB_THREADS")]
    threads: Option<usize>,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Attach statistical self-checks to the output.
    #[arg(long, global = true)]
    emit_tests: bool,
    /// Confidence level of reported intervals.
    #[arg(long, global = true, default_value_t = 0.9973)]
    level: f64,
    #[command(subcommand)]
    command: Command,
}

pub enum Failure {
    Usage(String),
    Numeric(String),
}

impl From<invsub::Error> for Failure {
    fn from(e: invsub::Error) -> Self {
        if e.is_numeric() {
            Failure::Numeric(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    if !(cli.level > 0.0 && cli.level < 1.0) {
        return Err(Failure::Usage(format!("--level {} outside (0, 1)", cli.level)));
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Usage("--threads must be positive".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| Failure::Usage(e.to_string()))?;
    let ctx = commands::Context {
        seed: cli.seed,
        level: cli.level,
        emit_tests: cli.emit_tests,
    };
    let report = pool.install(|| cli.command.execute(&ctx))?;
    let config = serde_json::json!({
        "tool": "invsub",
        "version": env!("CARGO_PKG_VERSION"),
        "subcommand": cli.command.name(),
        "args": cli,
    });
    let text = report.render(cli.format.unwrap_or(cli.command.default_format()), &config);
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(report.verified)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let start = Instant::now();
    let code = match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("invsub: check failed");
            ExitCode::from(3)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("invsub: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Numeric(m)) => {
            eprintln!("invsub: numeric failure: {m}");
            ExitCode::from(2)
        }
    };
    eprintln!("runtime: {:.3}s", start.elapsed().as_secs_f64());
    code
}
