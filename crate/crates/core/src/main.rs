use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qtorus::cli::{run, Format, Task};

/// Exact invariants of lattice levels, twisted surface cohomology and the
/// resulting gerbe blocks.
#[derive(Parser)]
#[command(name = "qtorus", version)]
struct Args {
    task: Task,
    /// Job spec (JSON). Read from stdin when absent, except for `selfcheck`.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Seed for the randomized part of `selfcheck`.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Some(n) = std::env::var("QTORUS_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let text = match (&args.input, args.task) {
        (Some(path), _) => match std::fs::read_to_string(path) {
            Ok(t) => Some(t),
            Err(e) => {
                eprintln!(
                    "{}",
                    serde_json::json!({"code": "io_error", "message": e.to_string(), "path": path.display().to_string()})
                );
                return ExitCode::from(2);
            }
        },
        (None, Task::Selfcheck) => None,
        (None, _) => {
            let mut buf = String::new();
            if let Err(e) = std::io::stdin().read_to_string(&mut buf) {
                eprintln!("{}", serde_json::json!({"code": "io_error", "message": e.to_string(), "path": ""}));
                return ExitCode::from(2);
            }
            Some(buf)
        }
    };
    let outcome = run(args.task, text.as_deref(), args.format, args.seed);
    let written = if outcome.exit_code == 0 {
        std::io::stdout().write_all(&outcome.bytes)
    } else {
        std::io::stderr().write_all(&outcome.bytes)
    };
    if written.is_err() {
        return ExitCode::from(2);
    }
    ExitCode::from(outcome.exit_code as u8)
}
