mod commands;
mod config;
mod error;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::CliError;

/// Clauser-Horne Bell-test laboratory.
///
/// Every command prints one JSON document on standard output. Angles are in
/// degrees on the command line.
#[derive(Debug, Parser)]
#[command(name = "chlab", version)]
struct Cli {
    #[command(flatten)]
    common: Common,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Master RNG seed (u64). Overrides the config seed for `simulate`.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Also write the JSON document to this file.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Compact single-line JSON instead of pretty-printed JSON.
    #[arg(long, global = true)]
    json: bool,

    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    Predict(commands::PredictArgs),
    Ch(commands::ChArgs),
    Optimize(commands::OptimizeArgs),
    Threshold(commands::ThresholdArgs),
    Simulate(commands::SimulateArgs),
    Sed(commands::SedArgs),
    Spuc(commands::SpucArgs),
    Dbb(commands::DbbArgs),
}

fn run(command: Command, seed: Option<u64>) -> Result<serde_json::Value, CliError> {
    match command {
        Command::Predict(a) => commands::predict(a),
        Command::Ch(a) => commands::ch(a),
        Command::Optimize(a) => commands::optimize(a),
        Command::Threshold(a) => commands::threshold(a),
        Command::Simulate(a) => commands::simulate(a, seed),
        Command::Sed(a) => commands::sed(a),
        Command::Spuc(a) => commands::spuc(a),
        Command::Dbb(a) => commands::dbb(a),
    }
}

fn emit(doc: &serde_json::Value, common: &Common) -> Result<(), CliError> {
    let mut text = if common.json {
        serde_json::to_string(doc)
    } else {
        serde_json::to_string_pretty(doc)
    }
    .map_err(std::io::Error::other)?;
    text.push('\n');
    if let Some(path) = &common.output {
        std::fs::write(path, &text)?;
    }
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let Cli { common, command } = Cli::parse();
    if let Some(n) = common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(command, common.seed).and_then(|doc| emit(&doc, &common)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
