use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use pointwave::commands::{run_command, Command, RunOptions, EXIT_ERROR};
use pointwave::scenario::parse_scenario;

/// Wave equation with point interactions: validate, classify, simulate, and
/// test finite propagation speed for a scenario file.
#[derive(Debug, Parser)]
#[command(version, about)]
struct Cli {
    #[arg(value_enum)]
    command: Command,

    /// Scenario file (TOML).
    #[arg(long)]
    scenario: PathBuf,

    /// Output directory; created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Override the time step.
    #[arg(long)]
    step: Option<f64>,

    /// Override the polar quadrature order (azimuthal order is twice this).
    #[arg(long)]
    quad_order: Option<usize>,

    /// Accepted for interface stability; the engine is deterministic.
    #[arg(long)]
    seed: Option<u64>,

    /// Worker threads for snapshot evaluation.
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = || -> pointwave::Result<i32> {
        let text = std::fs::read_to_string(&cli.scenario)?;
        let scenario = parse_scenario(&text)?;
        let options = RunOptions {
            step: cli.step,
            quad_order: cli.quad_order,
            workers: cli.workers,
        };
        let outcome = run_command(cli.command, &scenario, &cli.out, &options)?;
        println!("{}", outcome.summary);
        for f in &outcome.files {
            println!("wrote {}", f.display());
        }
        Ok(outcome.exit_code)
    };
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
