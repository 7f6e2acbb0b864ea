//! The fixed-timestep session loop.

use super::locomotion::Locomotion;
use super::log::{Event, LogHeader, SessionLog, TickSample, LOG_FORMAT, LOG_VERSION};
use super::spawn::{spawn_circle_target, spawn_target, CIRCLE_RADIUS_M};
use super::spec::{Cell, Point, WorldSpec};
use super::steps::{StepDetector, STEP_THRESHOLD_M};
use super::{Condition, WorldError};
use crate::dsp::{arrival_cue, pan_powers, spatialize_vox, BlockRenderer};
use crate::modulation::{
    gains, relative_target, wrap_angle, GainPair, ModulationConfig, PolarTarget, Pose,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Logging interval of the original protocol.
pub const DEFAULT_TICK_S: f64 = 0.033;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Turn to face a target on a circle, then commit.
    FrontDetect,
    /// Walk the grid to successive spawn points.
    Navigation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub condition: Condition,
    pub modulation: ModulationConfig,
    pub tick: f64,
    pub rng_seed: u64,
    pub trial_count: usize,
    pub mode: Mode,
    /// Cap on the turn-rate command, deg/s.
    pub max_turn_rate: f64,
    /// How long the grip must be held to commit an answer, s.
    pub hold_duration: f64,
    pub circle_radius: f64,
}

impl SessionConfig {
    pub fn new(mode: Mode, condition: Condition, modulation: ModulationConfig) -> Self {
        Self {
            condition,
            modulation,
            tick: DEFAULT_TICK_S,
            rng_seed: 1,
            trial_count: match mode {
                Mode::FrontDetect => 25,
                Mode::Navigation => 24,
            },
            mode,
            max_turn_rate: 360.0,
            hold_duration: 1.0,
            circle_radius: CIRCLE_RADIUS_M,
        }
    }

    pub fn validate(&self) -> Result<(), WorldError> {
        if !(self.tick.is_finite() && self.tick > 0.0) {
            return Err(WorldError::Config(format!(
                "tick must be > 0, got {}",
                self.tick
            )));
        }
        if self.trial_count < 1 {
            return Err(WorldError::Config("trial_count must be >= 1".into()));
        }
        if !(self.max_turn_rate.is_finite() && self.max_turn_rate > 0.0) {
            return Err(WorldError::Config(format!(
                "max_turn_rate must be > 0, got {}",
                self.max_turn_rate
            )));
        }
        if !(self.hold_duration.is_finite() && self.hold_duration >= 0.0) {
            return Err(WorldError::Config(format!(
                "hold_duration must be >= 0, got {}",
                self.hold_duration
            )));
        }
        if !(self.circle_radius.is_finite() && self.circle_radius > 0.0) {
            return Err(WorldError::Config(format!(
                "circle_radius must be > 0, got {}",
                self.circle_radius
            )));
        }
        self.modulation.validate()?;
        Ok(())
    }
}

/// Input for one tick.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Command {
    /// deg/s, positive = left.
    #[serde(default)]
    pub turn_rate: f64,
    /// Trigger one step directly.
    #[serde(default)]
    pub step: bool,
    /// Leg tracker height relative to standing, fed to the step detector.
    #[serde(default)]
    pub height: Option<f64>,
    /// Grip button held.
    #[serde(default)]
    pub grip: bool,
}

/// What a participant can feel or hear when facing a given way.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Percept {
    pub left: f64,
    pub right: f64,
    /// The source is heard behind (spectral cue of a spatial renderer).
    /// Never set by vibration.
    pub rear: bool,
}

/// Feedback as it would be with the head turned by `offset` degrees.
pub trait Sensor {
    fn sense(&self, offset: f64) -> Percept;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialInfo {
    pub index: usize,
    pub started_at: f64,
}

/// Everything a controller may look at. The target position is not here.
pub struct Observation<'a> {
    pub time: f64,
    pub tick: f64,
    pub pose: Pose,
    pub world: &'a WorldSpec,
    pub mode: Mode,
    pub condition: Condition,
    pub trial: TrialInfo,
    /// Queued forward distance not yet walked.
    pub pending_motion: f64,
    pub sensor: &'a dyn Sensor,
}

pub trait Controller {
    fn control(&mut self, obs: &Observation<'_>) -> Command;
}

/// Controller that never acts.
#[derive(Debug, Clone, Copy, Default)]
pub struct Idle;

impl Controller for Idle {
    fn control(&mut self, _: &Observation<'_>) -> Command {
        Command::default()
    }
}

struct FeedbackSensor {
    pose: Pose,
    target: Point,
    condition: Condition,
    modulation: ModulationConfig,
}

impl Sensor for FeedbackSensor {
    fn sense(&self, offset: f64) -> Percept {
        let mut pose = self.pose;
        pose.heading = wrap_angle(pose.heading + offset).unwrap_or(pose.heading);
        let rel = relative_target(&pose, (self.target.x, self.target.y));
        if self.condition.spatial_vox() {
            let (l, r) = pan_powers(rel.theta());
            Percept {
                left: l,
                right: r,
                rear: rel.theta().abs() > 90.0,
            }
        } else {
            let g = haptic_gains(self.condition, &self.modulation, rel);
            Percept {
                left: g.left,
                right: g.right,
                rear: false,
            }
        }
    }
}

/// Vibration gains presented under `condition`.
pub fn haptic_gains(condition: Condition, cfg: &ModulationConfig, rel: PolarTarget) -> GainPair {
    match condition {
        Condition::Nt => GainPair::new(0.0, 0.0),
        Condition::NtHap => GainPair::new(cfg.c_max / 2.0, cfg.c_max / 2.0),
        // a validated config and a wrapped azimuth cannot fail here
        Condition::HapDir => gains(rel, &cfg.direction_only()).unwrap_or_default(),
        Condition::HapDirDist => gains(rel, cfg).unwrap_or_default(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TickOutcome {
    pub sample: TickSample,
    /// Events logged since the previous tick, in order.
    pub events: Vec<Event>,
}

pub struct Session {
    world: Arc<WorldSpec>,
    cfg: SessionConfig,
    condition: Condition,
    rng: ChaCha8Rng,
    pose: Pose,
    loco: Locomotion,
    detector: StepDetector,
    k: u64,
    target_id: usize,
    target: Point,
    trial: TrialInfo,
    completed: usize,
    finished: bool,
    grip_since: Option<f64>,
    cell: Option<Cell>,
    junction: Option<(Cell, f64)>,
    renderer: Option<BlockRenderer>,
    log: SessionLog,
    recent: Vec<Event>,
    path_length: f64,
}

impl Session {
    pub fn new(
        world: Arc<WorldSpec>,
        cfg: SessionConfig,
        source: &str,
    ) -> Result<Self, WorldError> {
        cfg.validate()?;
        let header = LogHeader {
            format: LOG_FORMAT.into(),
            version: LOG_VERSION,
            mode: cfg.mode,
            condition: cfg.condition,
            tick: cfg.tick,
            seed: cfg.rng_seed,
            trial_count: cfg.trial_count,
            modulation: cfg.modulation,
            world_hash: world.hash(),
            source: source.into(),
        };
        let start = world.start();
        let mut s = Self {
            pose: Pose::new(start.x, start.y, 90.0)?,
            cell: world.cell_of(start),
            condition: cfg.condition,
            rng: ChaCha8Rng::seed_from_u64(cfg.rng_seed),
            loco: Locomotion::default(),
            detector: StepDetector::new(0.0, STEP_THRESHOLD_M),
            k: 0,
            target_id: 0,
            target: start,
            trial: TrialInfo {
                index: 0,
                started_at: 0.0,
            },
            completed: 0,
            finished: false,
            grip_since: None,
            junction: None,
            renderer: None,
            log: SessionLog::new(header),
            recent: Vec::new(),
            path_length: 0.0,
            world,
            cfg,
        };
        s.spawn(0.0, None)?;
        let first = s.sample(0.0);
        s.log.push_sample(first);
        Ok(s)
    }

    pub fn attach_renderer(&mut self, renderer: BlockRenderer) {
        self.renderer = Some(renderer);
    }

    pub fn renderer(&self) -> Option<&BlockRenderer> {
        self.renderer.as_ref()
    }

    pub fn config(&self) -> &SessionConfig {
        &self.cfg
    }

    pub fn world(&self) -> &WorldSpec {
        &self.world
    }

    pub fn pose(&self) -> Pose {
        self.pose
    }

    pub fn condition(&self) -> Condition {
        self.condition
    }

    pub fn time(&self) -> f64 {
        self.k as f64 * self.cfg.tick
    }

    pub fn ticks(&self) -> u64 {
        self.k
    }

    pub fn is_finished(&self) -> bool {
        self.finished
    }

    pub fn completed_trials(&self) -> usize {
        self.completed
    }

    /// Total distance walked so far.
    pub fn path_length(&self) -> f64 {
        self.path_length
    }

    pub fn target_id(&self) -> usize {
        self.target_id
    }

    pub fn target_position(&self) -> Point {
        self.target
    }

    pub fn relative_target(&self) -> PolarTarget {
        relative_target(&self.pose, (self.target.x, self.target.y))
    }

    pub fn log(&self) -> &SessionLog {
        &self.log
    }

    pub fn into_log(self) -> SessionLog {
        self.log
    }

    /// Events logged since the last tick or drain.
    pub fn drain_events(&mut self) -> Vec<Event> {
        std::mem::take(&mut self.recent)
    }

    fn emit(&mut self, e: Event) {
        self.recent.push(e.clone());
        self.log.push_event(e);
    }

    fn spawn(&mut self, t: f64, exclude: Option<usize>) -> Result<(), WorldError> {
        match self.cfg.mode {
            Mode::Navigation => {
                let (id, p) = spawn_target(&mut self.rng, &self.world, exclude)?;
                self.target_id = id;
                self.target = p;
            }
            Mode::FrontDetect => {
                let c = spawn_circle_target(&mut self.rng, self.cfg.circle_radius)?;
                let b = c.theta().to_radians();
                self.target_id = self.trial.index;
                self.target =
                    Point::new(self.pose.x + c.r() * b.cos(), self.pose.y + c.r() * b.sin());
            }
        }
        self.trial.started_at = t;
        self.junction = self
            .cell
            .filter(|&c| self.cfg.mode == Mode::Navigation && self.world.is_junction(c))
            .map(|c| (c, self.relative_target().theta()));
        self.emit(Event::TargetSpawn {
            t,
            target: self.target_id,
            x: self.target.x,
            y: self.target.y,
        });
        Ok(())
    }

    /// Switches the presentation condition from the next tick on.
    pub fn set_condition(&mut self, condition: Condition) {
        if condition != self.condition {
            self.condition = condition;
            let t = self.time();
            self.emit(Event::ConditionChange { t, condition });
        }
    }

    /// Records the signed azimuth error of the current heading and starts the
    /// next direction-finding trial.
    pub fn commit_answer(&mut self) -> Result<f64, WorldError> {
        let t = self.time();
        self.commit_at(t)
    }

    fn commit_at(&mut self, t: f64) -> Result<f64, WorldError> {
        if self.cfg.mode != Mode::FrontDetect {
            return Err(WorldError::Protocol(
                "answer commit is only valid in front_detect mode".into(),
            ));
        }
        if self.finished {
            return Err(WorldError::Protocol("commit outside a trial".into()));
        }
        let error = self.relative_target().theta();
        self.emit(Event::AnswerCommit {
            t,
            target: self.target_id,
            error_deg: error,
            response_time: t - self.trial.started_at,
        });
        self.completed += 1;
        self.grip_since = None;
        if self.completed >= self.cfg.trial_count {
            self.finished = true;
        } else {
            self.trial.index += 1;
            self.spawn(t, None)?;
        }
        Ok(error)
    }

    /// Asks `controller` for a command and advances one tick.
    pub fn tick(&mut self, controller: &mut dyn Controller) -> Result<TickOutcome, WorldError> {
        let sensor = FeedbackSensor {
            pose: self.pose,
            target: self.target,
            condition: self.condition,
            modulation: self.cfg.modulation,
        };
        let obs = Observation {
            time: self.time(),
            tick: self.cfg.tick,
            pose: self.pose,
            world: &self.world,
            mode: self.cfg.mode,
            condition: self.condition,
            trial: self.trial,
            pending_motion: self.loco.remaining(),
            sensor: &sensor,
        };
        let cmd = controller.control(&obs);
        self.step(cmd)
    }

    /// Advances one tick with an explicit command.
    pub fn step(&mut self, cmd: Command) -> Result<TickOutcome, WorldError> {
        if self.finished {
            return Err(WorldError::Protocol("session already finished".into()));
        }
        let dt = self.cfg.tick;
        let t = (self.k + 1) as f64 * dt;

        let rate = if cmd.turn_rate.is_finite() {
            cmd.turn_rate
                .clamp(-self.cfg.max_turn_rate, self.cfg.max_turn_rate)
        } else {
            0.0
        };
        self.pose.heading = wrap_angle(self.pose.heading + rate * dt)?;

        if cmd.step {
            self.loco.queue_step();
            self.emit(Event::Step { t });
        }
        if let Some(h) = cmd.height {
            if self.detector.push(h, t).is_some() {
                self.loco.queue_step();
                self.emit(Event::Step { t });
            }
        }
        let moved = self.loco.advance(&mut self.pose, &self.world, dt);
        self.path_length += moved.distance;

        if self.cfg.mode == Mode::Navigation {
            self.track_junctions(t);
        }

        if self.cfg.mode == Mode::FrontDetect {
            if cmd.grip {
                let since = *self.grip_since.get_or_insert(t - dt);
                if t - since >= self.cfg.hold_duration - 1e-9 {
                    self.commit_at(t)?;
                }
            } else {
                self.grip_since = None;
            }
        }

        if self.cfg.mode == Mode::Navigation
            && !self.finished
            && self.relative_target().r() <= self.world.contact_radius()
        {
            self.emit(Event::Contact {
                t,
                target: self.target_id,
            });
            let cue = arrival_cue(self.condition);
            self.emit(Event::Cue { t, cue });
            if let Some(r) = self.renderer.as_mut() {
                r.trigger_cue(self.condition);
            }
            // the avatar halts on arrival; the rest of the step is dropped
            self.loco.clear();
            self.completed += 1;
            if self.completed >= self.cfg.trial_count {
                self.finished = true;
            } else {
                self.trial.index += 1;
                let current = self.target_id;
                self.spawn(t, Some(current))?;
            }
        }

        let sample = self.sample(t);
        if let Some(r) = self.renderer.as_mut() {
            let fs = r.sample_rate() as f64;
            let a = (self.k as f64 * dt * fs).round() as usize;
            let b = ((self.k + 1) as f64 * dt * fs).round() as usize;
            r.render(b - a, self.condition, sample.gains, sample.theta, |_, _| {});
        }
        self.log.push_sample(sample.clone());
        self.k += 1;
        Ok(TickOutcome {
            sample,
            events: std::mem::take(&mut self.recent),
        })
    }

    fn sample(&self, t: f64) -> TickSample {
        let rel = self.relative_target();
        let vox = self.condition.spatial_vox().then(|| {
            let f = spatialize_vox(1.0, rel.theta());
            GainPair::new(f.left, f.right)
        });
        TickSample {
            t,
            x: self.pose.x,
            y: self.pose.y,
            heading: self.pose.heading,
            target: self.target_id,
            r: rel.r(),
            theta: rel.theta(),
            gains: haptic_gains(self.condition, &self.cfg.modulation, rel),
            vox,
            condition: self.condition,
        }
    }

    fn track_junctions(&mut self, t: f64) {
        let now = self.world.cell_of(Point::new(self.pose.x, self.pose.y));
        if now == self.cell {
            return;
        }
        if let (Some((junction, theta)), Some(exit)) = (self.junction, now) {
            if Some(junction) == self.cell {
                self.emit(Event::CrossroadChoice {
                    t,
                    junction,
                    exit,
                    theta,
                    target: self.target_id,
                    target_x: self.target.x,
                    target_y: self.target.y,
                });
            }
        }
        self.cell = now;
        self.junction = now
            .filter(|&c| self.world.is_junction(c))
            .map(|c| (c, self.relative_target().theta()));
    }
}
