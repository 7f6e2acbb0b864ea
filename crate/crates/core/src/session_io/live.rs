//! Sans-IO live session: JSON text messages in, JSON text messages out.
//! A transport feeds client messages to [`LiveSession::handle_text`] and
//! calls [`LiveSession::tick`] at the tick rate.

use crate::modulation::GainPair;
use crate::world::{
    Command, Condition, Event, Mode, Point, Session, SessionConfig, SessionLog, WorldError,
    WorldSpec,
};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

pub const PROTOCOL: &str = "vibronav-live";
pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClientMessage {
    Hello {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        client: Option<String>,
        /// Session id to reattach to.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        resume: Option<String>,
    },
    /// Condition select.
    Config {
        condition: Condition,
    },
    Input(Input),
}

/// Absent fields leave the held state unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Input {
    /// deg/s, held until changed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub turn_rate: Option<f64>,
    /// One step per `true`.
    #[serde(default)]
    pub step: bool,
    /// Leg height sample for the step detector, m above standing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<f64>,
    /// Grip state, held until changed; one second commits.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grip: Option<bool>,
    /// Commit the current heading immediately.
    #[serde(default)]
    pub commit: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldView {
    pub cell_size: f64,
    pub width: usize,
    pub height: usize,
    /// `#` blocked, `.` free, north row first.
    pub rows: Vec<String>,
    pub start: Point,
    pub spawn_points: Vec<Point>,
    pub contact_radius: f64,
}

impl WorldView {
    pub fn of(w: &WorldSpec) -> Self {
        let rows = (0..w.height())
            .rev()
            .map(|j| {
                (0..w.width())
                    .map(|i| {
                        if w.is_blocked(crate::world::Cell::new(i, j)) {
                            '#'
                        } else {
                            '.'
                        }
                    })
                    .collect()
            })
            .collect();
        Self {
            cell_size: w.cell_size(),
            width: w.width(),
            height: w.height(),
            rows,
            start: w.start(),
            spawn_points: w.spawn_points().to_vec(),
            contact_radius: w.contact_radius(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFrame {
    pub tick: u64,
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub target: usize,
    pub target_x: f64,
    pub target_y: f64,
    pub r: f64,
    pub theta: f64,
    pub gains: GainPair,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vox: Option<GainPair>,
    pub condition: Condition,
    pub completed: usize,
    pub finished: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    Hello {
        protocol: String,
        version: u32,
        session: String,
        world: WorldView,
    },
    Config {
        session: SessionConfig,
    },
    State(StateFrame),
    Event {
        event: Event,
    },
    Error {
        message: String,
    },
}

impl ServerMessage {
    pub fn to_text(&self) -> String {
        serde_json::to_string(self).expect("server messages always serialize")
    }

    fn error(message: impl Into<String>) -> Self {
        ServerMessage::Error {
            message: message.into(),
        }
    }
}

/// One human-driven session. Held inputs persist between ticks.
pub struct LiveSession {
    id: String,
    session: Session,
    turn_rate: f64,
    grip: bool,
    steps: u32,
    height: Option<f64>,
}

impl LiveSession {
    pub fn new(id: &str, world: Arc<WorldSpec>, cfg: SessionConfig) -> Result<Self, WorldError> {
        Ok(Self {
            id: id.into(),
            session: Session::new(world, cfg, "live")?,
            turn_rate: 0.0,
            grip: false,
            steps: 0,
            height: None,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn session(&self) -> &Session {
        &self.session
    }

    pub fn is_finished(&self) -> bool {
        self.session.is_finished()
    }

    pub fn log(&self) -> &SessionLog {
        self.session.log()
    }

    pub fn into_log(self) -> SessionLog {
        self.session.into_log()
    }

    /// Greeting sent when a client attaches.
    pub fn opening(&self) -> Vec<ServerMessage> {
        vec![
            ServerMessage::Hello {
                protocol: PROTOCOL.into(),
                version: PROTOCOL_VERSION,
                session: self.id.clone(),
                world: WorldView::of(self.session.world()),
            },
            ServerMessage::Config {
                session: self.session.config().clone(),
            },
        ]
    }

    /// Parses and applies one client text frame. Bad input yields an error
    /// frame and leaves the session untouched.
    pub fn handle_text(&mut self, text: &str) -> Vec<ServerMessage> {
        match serde_json::from_str::<ClientMessage>(text) {
            Ok(m) => self.handle(m),
            Err(e) => vec![ServerMessage::error(format!("malformed message: {e}"))],
        }
    }

    pub fn handle(&mut self, msg: ClientMessage) -> Vec<ServerMessage> {
        match msg {
            ClientMessage::Hello { .. } => self.opening(),
            ClientMessage::Config { condition } => {
                self.session.set_condition(condition);
                self.drain()
            }
            ClientMessage::Input(input) => {
                if let Some(r) = input.turn_rate {
                    if !r.is_finite() {
                        return vec![ServerMessage::error("turn_rate must be finite")];
                    }
                    self.turn_rate = r;
                }
                if let Some(g) = input.grip {
                    self.grip = g;
                }
                if let Some(h) = input.height {
                    if !h.is_finite() {
                        return vec![ServerMessage::error("height must be finite")];
                    }
                    self.height = Some(h);
                }
                self.steps += u32::from(input.step);
                if input.commit {
                    if let Err(e) = self.session.commit_answer() {
                        return vec![ServerMessage::error(e.to_string())];
                    }
                    return self.drain();
                }
                Vec::new()
            }
        }
    }

    fn drain(&mut self) -> Vec<ServerMessage> {
        self.session
            .drain_events()
            .into_iter()
            .map(|event| ServerMessage::Event { event })
            .collect()
    }

    /// Advances one tick: events of the tick, then the state frame.
    pub fn tick(&mut self) -> Vec<ServerMessage> {
        if self.session.is_finished() {
            return Vec::new();
        }
        let cmd = Command {
            turn_rate: self.turn_rate,
            step: self.steps > 0,
            height: self.height.take(),
            grip: self.grip && self.session.config().mode == Mode::FrontDetect,
        };
        self.steps = self.steps.saturating_sub(1);
        let out = match self.session.step(cmd) {
            Ok(o) => o,
            Err(e) => return vec![ServerMessage::error(e.to_string())],
        };
        let s = out.sample;
        let target = self.session.target_position();
        let mut msgs: Vec<ServerMessage> = out
            .events
            .into_iter()
            .map(|event| ServerMessage::Event { event })
            .collect();
        msgs.push(ServerMessage::State(StateFrame {
            tick: self.session.ticks(),
            t: s.t,
            x: s.x,
            y: s.y,
            heading: s.heading,
            target: s.target,
            target_x: target.x,
            target_y: target.y,
            r: s.r,
            theta: s.theta,
            gains: s.gains,
            vox: s.vox,
            condition: s.condition,
            completed: self.session.completed_trials(),
            finished: self.session.is_finished(),
        }));
        msgs
    }
}
