use super::{perceive, AgentParams};
use crate::world::{Command, Controller, Mode, Observation, Percept};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Turn below which a correction is treated as no correction, degrees.
const SETTLE_EPS_DEG: f64 = 1e-3;

/// Turn-rate command from one percept: toward the louder side, proportional
/// to the imbalance, zero inside the JND deadband. A rear impression turns
/// the agent around.
pub fn balance_seek_policy(p: Percept, params: &AgentParams) -> f64 {
    let sum = p.left + p.right;
    if !(sum > 0.0) {
        return 0.0;
    }
    let diff = p.left - p.right;
    let balanced = diff.abs() <= params.amp_jnd * sum / 2.0;
    let imbalance = diff / sum;
    let turn = match (p.rear, balanced) {
        (false, true) => 0.0,
        (false, false) => 90.0 * imbalance,
        (true, true) => 180.0,
        (true, false) => imbalance.signum() * (180.0 - 90.0 * imbalance.abs()),
    };
    (turn / params.decision_period).clamp(-params.turn_rate, params.turn_rate)
}

/// Direction-finding participant: balances the two sides, waits for the
/// percept to stay balanced for `settle_time`, then holds the grip.
#[derive(Debug, Clone)]
pub struct Seeker {
    params: AgentParams,
    rng: ChaCha8Rng,
    trial: Option<usize>,
    confused: bool,
    next_decision: u64,
    rate: f64,
    settled_for: f64,
    committing: bool,
}

impl Seeker {
    pub fn new(params: AgentParams, seed: u64) -> Self {
        Self {
            params,
            rng: ChaCha8Rng::seed_from_u64(seed),
            trial: None,
            confused: false,
            next_decision: 0,
            rate: 0.0,
            settled_for: 0.0,
            committing: false,
        }
    }

    pub fn params(&self) -> &AgentParams {
        &self.params
    }
}

impl Controller for Seeker {
    fn control(&mut self, obs: &Observation<'_>) -> Command {
        if obs.mode != Mode::FrontDetect {
            return Command::default();
        }
        let k = (obs.time / obs.tick).round() as u64;
        if self.trial != Some(obs.trial.index) {
            self.trial = Some(obs.trial.index);
            self.confused = self.rng.random_bool(self.params.front_back_confusion_p);
            self.next_decision = k;
            self.rate = 0.0;
            self.settled_for = 0.0;
            self.committing = false;
        }
        if self.committing {
            return Command {
                grip: true,
                ..Default::default()
            };
        }
        if k >= self.next_decision {
            let n = ((self.params.decision_period / obs.tick).round() as u64).max(1);
            self.next_decision = k + n;
            let spatial = obs.condition.spatial_vox();
            // vibration cannot tell front from back: a confused seeker
            // balances with its back to the target
            let offset = if self.confused && !spatial {
                180.0
            } else {
                0.0
            };
            let flip = self.confused && spatial;
            let p = perceive(obs.sensor, offset, flip, self.params.sigma(), &mut self.rng);
            let period = n as f64 * obs.tick;
            let params = AgentParams {
                decision_period: period,
                ..self.params
            };
            self.rate = balance_seek_policy(p, &params);
            if (self.rate * period).abs() < SETTLE_EPS_DEG {
                self.rate = 0.0;
            }
        }
        if self.rate == 0.0 {
            self.settled_for += obs.tick;
        } else {
            self.settled_for = 0.0;
        }
        if self.settled_for >= self.params.settle_time - 1e-9 {
            self.committing = true;
            return Command {
                grip: true,
                ..Default::default()
            };
        }
        Command {
            turn_rate: self.rate,
            ..Default::default()
        }
    }
}
