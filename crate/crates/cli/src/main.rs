//! `vibronav` command-line entry point.

mod analyze;
mod audio;
mod calibrate;
mod serve;
mod simulate;

use clap::{Parser, Subcommand};
use std::path::Path;
use std::process::ExitCode;
use vibronav::session_io::RunConfig;
use vibronav::WorldSpec;

#[derive(Parser)]
#[command(
    name = "vibronav",
    version,
    about = "Stereo-balance vibration navigation: simulate, analyze, serve"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run agent sessions and write logs plus a manifest.
    Simulate(simulate::Args),
    /// Tabulate session logs or questionnaire scores.
    Analyze(analyze::Args),
    /// Loudness and THD of audio tracks, with optional normalization.
    Audio(audio::Args),
    /// Serve live sessions over WebSocket.
    Serve(serve::Args),
    /// Fit the agent's amplitude JND to a target direction-finding error.
    Calibrate(calibrate::Args),
}

/// Errors sorted by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad invocation: exit 2.
    Usage(String),
    /// Anything that went wrong while doing the work: exit 1.
    Domain(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Domain(e.into())
    }
}

pub type CliResult = Result<(), Failure>;

/// Reads a run config, or the defaults for `mode` when no path is given,
/// together with the world it names.
pub fn load_config(
    path: Option<&Path>,
    fallback: vibronav::Mode,
) -> Result<(RunConfig, WorldSpec), Failure> {
    let cfg = match path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::new(fallback),
    };
    let world = cfg.load_world(path.and_then(Path::parent))?;
    Ok((cfg, world))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => simulate::run(a),
        Command::Analyze(a) => analyze::run(a),
        Command::Audio(a) => audio::run(a),
        Command::Serve(a) => serve::run(a),
        Command::Calibrate(a) => calibrate::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
