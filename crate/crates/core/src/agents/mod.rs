//! Scripted participants. They see gains, their own pose and the local
//! corridor layout, never the target position.

mod seeker;
mod walker;

pub use seeker::{balance_seek_policy, Seeker};
pub use walker::{crossroads_policy, forward_score, Walker};

use crate::world::{Percept, Sensor};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AgentError {
    #[error("invalid agent parameter {field}: {value}")]
    Invalid { field: &'static str, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgentParams {
    /// Just-noticeable relative gain difference.
    pub amp_jnd: f64,
    /// deg/s.
    pub turn_rate: f64,
    /// Seconds between perceptual updates.
    pub decision_period: f64,
    /// Chance of mistaking front for back, drawn once per trial.
    pub front_back_confusion_p: f64,
    /// How long the percept must stay balanced before committing, s.
    pub settle_time: f64,
}

impl Default for AgentParams {
    fn default() -> Self {
        Self {
            amp_jnd: 0.0,
            turn_rate: 360.0,
            decision_period: 0.1,
            front_back_confusion_p: 0.0,
            settle_time: 0.5,
        }
    }
}

impl AgentParams {
    /// Noise-free agent.
    pub fn ideal() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<(), AgentError> {
        let bad = |field, value| Err(AgentError::Invalid { field, value });
        if !(self.amp_jnd.is_finite() && self.amp_jnd >= 0.0) {
            return bad("amp_jnd", self.amp_jnd);
        }
        if !(self.turn_rate.is_finite() && self.turn_rate > 0.0) {
            return bad("turn_rate", self.turn_rate);
        }
        if !(self.decision_period.is_finite() && self.decision_period > 0.0) {
            return bad("decision_period", self.decision_period);
        }
        if !(0.0..=1.0).contains(&self.front_back_confusion_p) {
            return bad("front_back_confusion_p", self.front_back_confusion_p);
        }
        if !(self.settle_time.is_finite() && self.settle_time >= 0.0) {
            return bad("settle_time", self.settle_time);
        }
        Ok(())
    }

    /// Standard deviation of the multiplicative gain noise.
    pub fn sigma(&self) -> f64 {
        self.amp_jnd / 2.0
    }
}

/// Reads the sensor at `offset` with multiplicative Gaussian noise on each
/// side. `flip_rear` inverts the front/back impression.
pub(crate) fn perceive<R: Rng + ?Sized>(
    sensor: &dyn Sensor,
    offset: f64,
    flip_rear: bool,
    sigma: f64,
    rng: &mut R,
) -> Percept {
    let mut p = sensor.sense(offset);
    if sigma > 0.0 {
        let nl: f64 = rng.sample(StandardNormal);
        let nr: f64 = rng.sample(StandardNormal);
        p.left = (p.left * (1.0 + sigma * nl)).max(0.0);
        p.right = (p.right * (1.0 + sigma * nr)).max(0.0);
    }
    p.rear ^= flip_rear;
    p
}
