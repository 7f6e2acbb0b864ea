//! Configuration, log files, batch runs and the live-session protocol.

mod calibrate;
mod config;
pub mod live;
mod logfile;
mod manifest;
mod perf;
mod runner;

pub use calibrate::{calibrate_jnd, CalibrationPoint, CalibrationResult};
pub use config::{world_reach, ModulationSection, RunConfig, CONFIG_VERSION, DEFAULT_WORLD};
pub use logfile::{read_log, read_log_file, write_log, write_log_file};
pub use manifest::{RunManifest, ARTIFACT_VERSION};
pub use perf::{measure_realtime, RealtimeReport};
pub use runner::{run_batch, run_session, session_seeds, simulate, BatchRun, SimulationOutput};

use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{}", config_message(.line, .field, .msg))]
    Config {
        line: Option<usize>,
        field: Option<String>,
        msg: String,
    },
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("log line {line}: {msg}")]
    Log { line: usize, msg: String },
    #[error("manifest: {0}")]
    Manifest(String),
    #[error(transparent)]
    World(#[from] crate::world::WorldError),
    #[error(transparent)]
    Modulation(#[from] crate::modulation::ModulationError),
    #[error(transparent)]
    Eval(#[from] crate::evaluation::EvalError),
    #[error(transparent)]
    Dsp(#[from] crate::dsp::DspError),
}

fn config_message(line: &Option<usize>, field: &Option<String>, msg: &str) -> String {
    match (line, field) {
        (Some(l), Some(f)) => format!("config line {l}, field `{f}`: {msg}"),
        (Some(l), None) => format!("config line {l}: {msg}"),
        (None, Some(f)) => format!("config field `{f}`: {msg}"),
        (None, None) => format!("config: {msg}"),
    }
}

impl IoError {
    pub(crate) fn file(path: &Path, source: std::io::Error) -> Self {
        IoError::File {
            path: path.to_path_buf(),
            source,
        }
    }
}
