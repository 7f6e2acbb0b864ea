//! Fixed-timestep virtual environment for the direction-finding and grid
//! navigation protocols.

mod locomotion;
mod log;
mod session;
mod spawn;
mod spec;
mod steps;

pub use locomotion::{Locomotion, STEP_DURATION_S, STEP_LENGTH_M};
pub use log::{Event, LogHeader, Record, SessionLog, TickSample, LOG_FORMAT, LOG_VERSION};
pub use session::{
    haptic_gains, Command, Controller, Idle, Mode, Observation, Percept, Sensor, Session,
    SessionConfig, TickOutcome, TrialInfo, DEFAULT_TICK_S,
};
pub use spawn::{spawn_circle_target, spawn_target, CIRCLE_RADIUS_M};
pub use spec::{Cell, Dir, Point, WorldSpec};
pub use steps::{detect_steps, StepDetector, StepEvent, STEP_THRESHOLD_M};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WorldError {
    #[error("world file line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid world: {0}")]
    Invalid(String),
    #[error("invalid session config: {0}")]
    Config(String),
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error(transparent)]
    Modulation(#[from] crate::modulation::ModulationError),
}

/// Navigation conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Condition {
    /// Vocal track localized toward the target, no vibration.
    #[serde(rename = "NT")]
    Nt,
    /// Localized vocal track plus unmodulated vibration.
    #[serde(rename = "NT&Hap")]
    NtHap,
    /// Direction-modulated vibration, distance term off.
    #[serde(rename = "HapDir")]
    HapDir,
    /// Direction- and distance-modulated vibration.
    #[serde(rename = "HapDirDist")]
    HapDirDist,
}

impl Condition {
    pub const ALL: [Condition; 4] = [
        Condition::Nt,
        Condition::NtHap,
        Condition::HapDir,
        Condition::HapDirDist,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Condition::Nt => "NT",
            Condition::NtHap => "NT&Hap",
            Condition::HapDir => "HapDir",
            Condition::HapDirDist => "HapDirDist",
        }
    }

    /// File-name friendly label.
    pub fn slug(&self) -> &'static str {
        match self {
            Condition::Nt => "nt",
            Condition::NtHap => "nt-hap",
            Condition::HapDir => "hapdir",
            Condition::HapDirDist => "hapdirdist",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Condition::ALL
            .into_iter()
            .find(|c| c.label().eq_ignore_ascii_case(s) || c.slug() == s)
    }

    /// Arrival is signalled by vibration rather than a ping.
    pub fn haptic_cue(&self) -> bool {
        matches!(self, Condition::HapDir | Condition::HapDirDist)
    }

    /// The vocal track carries the direction.
    pub fn spatial_vox(&self) -> bool {
        matches!(self, Condition::Nt | Condition::NtHap)
    }
}

impl std::fmt::Display for Condition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}
