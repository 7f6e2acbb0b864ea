//! Per-tick session log.

use super::spec::Cell;
use super::{Condition, Mode};
use crate::dsp::CueKind;
use crate::modulation::{GainPair, ModulationConfig};
use serde::{Deserialize, Serialize};

pub const LOG_FORMAT: &str = "vibronav-session-log";
pub const LOG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogHeader {
    pub format: String,
    pub version: u32,
    pub mode: Mode,
    pub condition: Condition,
    pub tick: f64,
    pub seed: u64,
    pub trial_count: usize,
    pub modulation: ModulationConfig,
    pub world_hash: String,
    /// `agent` or `live`.
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TickSample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub target: usize,
    pub r: f64,
    pub theta: f64,
    pub gains: GainPair,
    /// Left/right amplitude of the localized vocal track, when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vox: Option<GainPair>,
    pub condition: Condition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Step {
        t: f64,
    },
    TargetSpawn {
        t: f64,
        target: usize,
        x: f64,
        y: f64,
    },
    /// The avatar left a junction cell into `exit`.
    CrossroadChoice {
        t: f64,
        junction: Cell,
        exit: Cell,
        /// Target azimuth relative to the heading on arrival at the junction.
        theta: f64,
        target: usize,
        target_x: f64,
        target_y: f64,
    },
    Contact {
        t: f64,
        target: usize,
    },
    Cue {
        t: f64,
        cue: CueKind,
    },
    AnswerCommit {
        t: f64,
        target: usize,
        error_deg: f64,
        response_time: f64,
    },
    ConditionChange {
        t: f64,
        condition: Condition,
    },
}

impl Event {
    pub fn time(&self) -> f64 {
        match *self {
            Event::Step { t }
            | Event::TargetSpawn { t, .. }
            | Event::CrossroadChoice { t, .. }
            | Event::Contact { t, .. }
            | Event::Cue { t, .. }
            | Event::AnswerCommit { t, .. }
            | Event::ConditionChange { t, .. } => t,
        }
    }
}

/// One line of a persisted log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Record {
    Header(LogHeader),
    Tick(TickSample),
    Event(Event),
}

/// Header plus samples and events in the order they happened.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionLog {
    pub header: LogHeader,
    pub records: Vec<Record>,
}

impl SessionLog {
    pub fn new(header: LogHeader) -> Self {
        Self {
            header,
            records: Vec::new(),
        }
    }

    pub fn samples(&self) -> impl Iterator<Item = &TickSample> {
        self.records.iter().filter_map(|r| match r {
            Record::Tick(s) => Some(s),
            _ => None,
        })
    }

    pub fn events(&self) -> impl Iterator<Item = &Event> {
        self.records.iter().filter_map(|r| match r {
            Record::Event(e) => Some(e),
            _ => None,
        })
    }

    pub fn push_event(&mut self, e: Event) {
        self.records.push(Record::Event(e));
    }

    pub fn push_sample(&mut self, s: TickSample) {
        self.records.push(Record::Tick(s));
    }
}
