use super::IoError;
use crate::agents::AgentParams;
use crate::dsp::StimulusParams;
use crate::modulation::ModulationConfig;
use crate::world::{Condition, Mode, SessionConfig, WorldSpec, CIRCLE_RADIUS_M, DEFAULT_TICK_S};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const CONFIG_VERSION: u32 = 1;
/// `world` value selecting the built-in layout.
pub const DEFAULT_WORLD: &str = "default";

fn default_world() -> String {
    DEFAULT_WORLD.into()
}
fn default_conditions() -> Vec<Condition> {
    Condition::ALL.to_vec()
}
fn default_tick() -> f64 {
    DEFAULT_TICK_S
}
fn default_seed() -> u64 {
    1
}
fn default_turn() -> f64 {
    360.0
}
fn default_hold() -> f64 {
    1.0
}
fn default_radius() -> f64 {
    CIRCLE_RADIUS_M
}
fn default_max_session() -> f64 {
    7200.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulationSection {
    #[serde(default = "one")]
    pub c_max: f64,
    #[serde(default = "floor")]
    pub c_min: f64,
    /// 1/m. When absent the floor is reached at the farthest spawn point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

fn one() -> f64 {
    1.0
}
fn floor() -> f64 {
    0.2
}

impl Default for ModulationSection {
    fn default() -> Self {
        Self {
            c_max: 1.0,
            c_min: 0.2,
            alpha: None,
        }
    }
}

/// One run: a world, a protocol, the conditions to run and the agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    /// Path to a world file, relative to the config file, or `default`.
    #[serde(default = "default_world")]
    pub world: String,
    pub mode: Mode,
    #[serde(default = "default_conditions")]
    pub conditions: Vec<Condition>,
    /// Trials per condition. Defaults to 25 (front_detect) or 24 (navigation).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trial_count: Option<usize>,
    #[serde(default = "default_tick")]
    pub tick: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_turn")]
    pub max_turn_rate: f64,
    #[serde(default = "default_hold")]
    pub hold_duration: f64,
    #[serde(default = "default_radius")]
    pub circle_radius: f64,
    /// Simulated-time cap per session, s.
    #[serde(default = "default_max_session")]
    pub max_session_s: f64,
    /// Run the block renderer alongside the simulation.
    #[serde(default)]
    pub render_audio: bool,
    #[serde(default)]
    pub stimulus: StimulusParams,
    #[serde(default)]
    pub modulation: ModulationSection,
    #[serde(default)]
    pub agent: AgentParams,
}

impl RunConfig {
    pub fn new(mode: Mode) -> Self {
        Self {
            version: CONFIG_VERSION,
            world: default_world(),
            mode,
            conditions: default_conditions(),
            trial_count: None,
            tick: default_tick(),
            seed: default_seed(),
            max_turn_rate: default_turn(),
            hold_duration: default_hold(),
            circle_radius: default_radius(),
            max_session_s: default_max_session(),
            render_audio: false,
            stimulus: StimulusParams::default(),
            modulation: ModulationSection::default(),
            agent: AgentParams::default(),
        }
    }

    /// Parses and validates. Errors carry the line of the offending key
    /// when it can be found.
    pub fn parse(text: &str) -> Result<Self, IoError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| IoError::Config {
            line: e.span().map(|s| line_at(text, s.start)),
            field: None,
            msg: e.message().to_string(),
        })?;
        cfg.validate().map_err(|e| match e {
            IoError::Config {
                line: None,
                field: Some(f),
                msg,
            } => IoError::Config {
                line: key_line(text, &f),
                field: Some(f),
                msg,
            },
            other => other,
        })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, IoError> {
        let text = std::fs::read_to_string(path).map_err(|e| IoError::file(path, e))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).unwrap_or_default()
    }

    pub fn trials(&self) -> usize {
        self.trial_count.unwrap_or(match self.mode {
            Mode::FrontDetect => 25,
            Mode::Navigation => 24,
        })
    }

    pub fn validate(&self) -> Result<(), IoError> {
        let bad = |field: &str, msg: String| {
            Err(IoError::Config {
                line: None,
                field: Some(field.into()),
                msg,
            })
        };
        if self.version != CONFIG_VERSION {
            return bad(
                "version",
                format!(
                    "unsupported version {}, expected {CONFIG_VERSION}",
                    self.version
                ),
            );
        }
        if self.conditions.is_empty() {
            return bad("conditions", "at least one condition is required".into());
        }
        for (i, c) in self.conditions.iter().enumerate() {
            if self.conditions[..i].contains(c) {
                return bad("conditions", format!("{c} listed twice"));
            }
        }
        if self.trials() < 1 {
            return bad("trial_count", "must be >= 1".into());
        }
        if !(self.tick.is_finite() && self.tick > 0.0) {
            return bad("tick", format!("must be > 0, got {}", self.tick));
        }
        if !(self.max_turn_rate.is_finite() && self.max_turn_rate > 0.0) {
            return bad(
                "max_turn_rate",
                format!("must be > 0, got {}", self.max_turn_rate),
            );
        }
        if !(self.hold_duration.is_finite() && self.hold_duration >= 0.0) {
            return bad(
                "hold_duration",
                format!("must be >= 0, got {}", self.hold_duration),
            );
        }
        if !(self.circle_radius.is_finite() && self.circle_radius > 0.0) {
            return bad(
                "circle_radius",
                format!("must be > 0, got {}", self.circle_radius),
            );
        }
        if !(self.max_session_s.is_finite() && self.max_session_s > 0.0) {
            return bad(
                "max_session_s",
                format!("must be > 0, got {}", self.max_session_s),
            );
        }
        let m = &self.modulation;
        if let Some(a) = m.alpha {
            if !(a.is_finite() && a > 0.0) {
                return bad("alpha", format!("must be > 0, got {a}"));
            }
        }
        if !(m.c_max.is_finite() && m.c_max > 0.0) {
            return bad("c_max", format!("must be > 0, got {}", m.c_max));
        }
        if !(m.c_min.is_finite() && 0.0 <= m.c_min && m.c_min <= m.c_max) {
            return bad("c_min", format!("must be in [0, c_max], got {}", m.c_min));
        }
        if let Err(crate::agents::AgentError::Invalid { field, value }) = self.agent.validate() {
            return bad(field, format!("invalid value {value}"));
        }
        Ok(())
    }

    /// Loads the world this config names. `base` is the config's directory.
    pub fn load_world(&self, base: Option<&Path>) -> Result<WorldSpec, IoError> {
        if self.world == DEFAULT_WORLD {
            return Ok(WorldSpec::default_world());
        }
        let mut p = PathBuf::from(&self.world);
        if p.is_relative() {
            if let Some(b) = base {
                p = b.join(p);
            }
        }
        let text = std::fs::read_to_string(&p).map_err(|e| IoError::file(&p, e))?;
        Ok(WorldSpec::parse(&text)?)
    }

    /// Modulation parameters with alpha filled in for `world`.
    pub fn modulation_for(&self, world: &WorldSpec) -> Result<ModulationConfig, IoError> {
        let m = &self.modulation;
        let cfg = match m.alpha {
            Some(alpha) => ModulationConfig::new(m.c_max, m.c_min, alpha, true)?,
            None => ModulationConfig::with_reach(m.c_max, m.c_min, world_reach(world))?,
        };
        Ok(cfg)
    }

    /// Session parameters for one condition.
    pub fn session_config(
        &self,
        world: &WorldSpec,
        condition: Condition,
        seed: u64,
    ) -> Result<SessionConfig, IoError> {
        let mut s = SessionConfig::new(self.mode, condition, self.modulation_for(world)?);
        s.tick = self.tick;
        s.rng_seed = seed;
        s.trial_count = self.trials();
        s.max_turn_rate = self.max_turn_rate;
        s.hold_duration = self.hold_duration;
        s.circle_radius = self.circle_radius;
        Ok(s)
    }
}

/// Largest straight-line distance from the start to a spawn point.
pub fn world_reach(world: &WorldSpec) -> f64 {
    world
        .spawn_points()
        .iter()
        .map(|p| p.dist(world.start()))
        .fold(0.0, f64::max)
}

fn line_at(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Line of the first `key =` assignment in `text`.
fn key_line(text: &str, key: &str) -> Option<usize> {
    text.lines()
        .position(|l| {
            let l = l.trim_start();
            l.strip_prefix(key)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map(|i| i + 1)
}
