use super::{perceive, AgentParams};
use crate::modulation::wrap_angle;
use crate::world::{
    Cell, Command, Controller, Dir, Locomotion, Mode, Observation, Percept, Point, WorldSpec,
    STEP_LENGTH_M,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// How attractive a corridor feels when facing it: large and balanced
/// wins, anything heard behind loses to everything in front.
pub fn forward_score(p: Percept) -> f64 {
    let m = p.left.min(p.right);
    if p.rear {
        -1.0 - m
    } else {
        m
    }
}

/// A straight-on corridor is kept while it scores at least this fraction
/// of the best one.
pub const STRAIGHT_BIAS: f64 = 0.5;

/// Picks the probed corridor with the best forward score, or `straight`
/// when it scores within [`STRAIGHT_BIAS`] of the best. Ties go to the
/// first probe.
pub fn crossroads_policy(probes: &[(Dir, Percept)], straight: Option<Dir>) -> Option<Dir> {
    let mut best: Option<(Dir, f64)> = None;
    for &(d, p) in probes {
        let s = forward_score(p);
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((d, s));
        }
    }
    let (d, b) = best?;
    let keep = straight.and_then(|sd| probes.iter().find(|(d, _)| *d == sd));
    match keep {
        Some(&(sd, p)) if b > 0.0 && forward_score(p) >= STRAIGHT_BIAS * b => Some(sd),
        _ => Some(d),
    }
}

/// Grid walker: probes each open corridor of a node by facing it, picks
/// one, and walks to the next node along it. The choice for the node ahead
/// is made while still approaching it, so straight runs are not broken up.
#[derive(Debug, Clone)]
pub struct Walker {
    params: AgentParams,
    rng: ChaCha8Rng,
    trial: Option<usize>,
    leg: Option<Leg>,
    next: Option<Leg>,
    looked_ahead: bool,
    /// Walk on to the node after stopping short of it.
    finish: bool,
    decisions: u64,
    confusions: u64,
    /// Decisions of the current trial still taken front/back mirrored.
    confused_left: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Leg {
    dir: Dir,
    goal: Point,
}

/// A confused trial mirrors this many decisions, starting with its first.
pub const CONFUSED_DECISIONS: u32 = 2;

/// Heading errors below this are corrected while walking, degrees.
const STEER_LIMIT_DEG: f64 = 45.0;
/// No steering this close to the leg goal, m.
const STEER_MIN_DIST: f64 = 1.0;

/// How far short of a node a turn may start without clipping the corner.
fn turn_stop(world: &WorldSpec) -> f64 {
    world.cell_size() / 2.0 - world.avatar_radius()
}

impl Walker {
    pub fn new(params: AgentParams, seed: u64) -> Self {
        Self {
            params,
            rng: ChaCha8Rng::seed_from_u64(seed),
            trial: None,
            leg: None,
            next: None,
            looked_ahead: false,
            finish: false,
            decisions: 0,
            confusions: 0,
            confused_left: 0,
        }
    }

    pub fn params(&self) -> &AgentParams {
        &self.params
    }

    /// Corridor decisions taken so far and how many were confused.
    pub fn decision_counts(&self) -> (u64, u64) {
        (self.decisions, self.confusions)
    }

    /// Chooses a corridor out of `node`, probing from the current pose.
    fn decide(&mut self, obs: &Observation<'_>, node: Cell, straight: Option<Dir>) -> Option<Leg> {
        let world = obs.world;
        let exits = world.exits(node);
        if exits.is_empty() {
            return None;
        }
        let confused = self.confused_left > 0;
        self.confused_left = self.confused_left.saturating_sub(1);
        self.decisions += 1;
        self.confusions += u64::from(confused);
        let spatial = obs.condition.spatial_vox();
        let sigma = self.params.sigma();
        let probes: Vec<(Dir, Percept)> = exits
            .iter()
            .map(|&d| {
                let mut offset = d.heading() - obs.pose.heading;
                if confused && !spatial {
                    offset += 180.0;
                }
                let offset = wrap_angle(offset).unwrap_or(0.0);
                let p = perceive(
                    obs.sensor,
                    offset,
                    confused && spatial,
                    sigma,
                    &mut self.rng,
                );
                (d, p)
            })
            .collect();
        let dir = crossroads_policy(&probes, straight)?;
        Some(Leg {
            dir,
            goal: world.center(next_node(world, node, dir)),
        })
    }

    /// After stopping short of a node for a turn, checks whether the node
    /// itself still feels better than the planned exit.
    fn stopped_short(&mut self, obs: &Observation<'_>, pos: Point) -> bool {
        let (Some(leg), Some(next)) = (self.leg, self.next) else {
            return false;
        };
        if pos.dist(leg.goal) <= STEP_LENGTH_M / 2.0 {
            return false;
        }
        let sigma = self.params.sigma();
        let ahead = (leg.goal.y - pos.y).atan2(leg.goal.x - pos.x).to_degrees();
        let probe = |heading: f64, rng: &mut ChaCha8Rng| {
            let offset = wrap_angle(heading - obs.pose.heading).unwrap_or(0.0);
            forward_score(perceive(obs.sensor, offset, false, sigma, rng))
        };
        let a = probe(ahead, &mut self.rng);
        let n = probe(next.dir.heading(), &mut self.rng);
        a > n
    }

    fn start_leg(&mut self, leg: Option<Leg>) {
        self.leg = leg;
        self.looked_ahead = false;
        self.finish = false;
    }
}

/// Signed distance left to the leg goal along the leg direction.
fn ahead(leg: Leg, p: Point) -> f64 {
    let (dx, dy) = leg.dir.delta();
    (leg.goal.x - p.x) * dx as f64 + (leg.goal.y - p.y) * dy as f64
}

/// The corridor direction `p` has already moved into from the center of `c`.
fn displaced(world: &WorldSpec, c: Cell, p: Point) -> Option<Dir> {
    let o = world.center(c);
    let (dx, dy) = (p.x - o.x, p.y - o.y);
    if dx.hypot(dy) < 1e-6 {
        return None;
    }
    let d = match (dx.abs() >= dy.abs(), dx >= 0.0, dy >= 0.0) {
        (true, true, _) => Dir::East,
        (true, false, _) => Dir::West,
        (false, _, true) => Dir::North,
        (false, _, false) => Dir::South,
    };
    world.exits(c).contains(&d).then_some(d)
}

/// First node reached from `c` going `d`.
fn next_node(world: &WorldSpec, mut c: Cell, d: Dir) -> Cell {
    while let Some(n) = world.neighbor(c, d).filter(|&n| world.is_free(n)) {
        c = n;
        if world.is_node(c) {
            break;
        }
    }
    c
}

fn turn_command(turn: f64, obs: &Observation<'_>, limit: f64) -> f64 {
    (turn / obs.tick).clamp(-limit, limit)
}

impl Controller for Walker {
    fn control(&mut self, obs: &Observation<'_>) -> Command {
        if obs.mode != Mode::Navigation {
            return Command::default();
        }
        let pos = Point::new(obs.pose.x, obs.pose.y);
        let idle = obs.pending_motion <= 0.0;
        if self.trial != Some(obs.trial.index) {
            // new target: forget the plan, decide afresh once stopped
            self.trial = Some(obs.trial.index);
            self.confused_left = if self.rng.random_bool(self.params.front_back_confusion_p) {
                CONFUSED_DECISIONS
            } else {
                0
            };
            self.leg = None;
            self.next = None;
        }
        if idle {
            let reach = turn_stop(obs.world).max(STEP_LENGTH_M / 2.0);
            let arrived = self.leg.is_none_or(|l| pos.dist(l.goal) <= reach);
            if arrived && !self.finish && self.stopped_short(obs, pos) {
                self.finish = true;
            } else if arrived {
                let leg = match self.next.take() {
                    Some(l) => Some(l),
                    None => obs
                        .world
                        .cell_of(pos)
                        .and_then(|c| self.decide(obs, c, displaced(obs.world, c, pos))),
                };
                self.start_leg(leg);
            }
        }
        let Some(leg) = self.leg else {
            return Command::default();
        };
        let dist = pos.dist(leg.goal);
        let bearing = (leg.goal.y - pos.y).atan2(leg.goal.x - pos.x).to_degrees();
        let turn = wrap_angle(bearing - obs.pose.heading).unwrap_or(0.0);
        if idle && turn.abs() > 1e-6 {
            return Command {
                turn_rate: turn_command(turn, obs, self.params.turn_rate),
                ..Default::default()
            };
        }
        let turn_rate = if !idle && dist > STEER_MIN_DIST && turn.abs() < STEER_LIMIT_DEG {
            turn_command(turn, obs, self.params.turn_rate)
        } else {
            0.0
        };
        let per_tick = Locomotion::SPEED * obs.tick;
        let mut leg = leg;
        let early = turn_stop(obs.world);
        if ahead(leg, pos) - obs.pending_motion <= STEP_LENGTH_M + early && !self.looked_ahead {
            // the next step may end the leg: choose what comes after the node
            self.looked_ahead = true;
            if let Some(node) = obs.world.cell_of(leg.goal) {
                match self.decide(obs, node, Some(leg.dir)) {
                    Some(l) if l.dir == leg.dir && l.goal != leg.goal => {
                        leg = l;
                        self.leg = Some(l);
                        self.looked_ahead = false;
                    }
                    other => self.next = other,
                }
            }
        }
        // before a turn, stopping short is free while overshooting is paid twice
        let stop = match self.next {
            _ if self.finish => 0.0,
            Some(n) if n.dir != leg.dir => early,
            _ => STEP_LENGTH_M / 2.0,
        };
        // measured along the corridor, so a passed goal is never chased
        let step = obs.pending_motion <= per_tick && ahead(leg, pos) - obs.pending_motion > stop;
        Command {
            turn_rate,
            step,
            ..Default::default()
        }
    }
}
