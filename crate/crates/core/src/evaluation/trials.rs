use super::path::DistanceField;
use super::EvalError;
use crate::world::{Cell, Condition, Event, Mode, Point, SessionLog, TickSample, WorldSpec};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TrialClass {
    Perfect,
    Good,
    Miss,
}

impl TrialClass {
    pub const ALL: [TrialClass; 3] = [TrialClass::Perfect, TrialClass::Good, TrialClass::Miss];

    pub fn from_wrong_turns(n: usize) -> Self {
        match n {
            0 => TrialClass::Perfect,
            1 => TrialClass::Good,
            _ => TrialClass::Miss,
        }
    }
}

/// One trial as delimited in a log: from a target spawn to the contact (or
/// answer) that ends it.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSpan {
    pub index: usize,
    pub target: usize,
    pub target_pos: Point,
    pub start: f64,
    /// `None` when the log stops before the trial ended.
    pub end: Option<f64>,
    pub condition: Condition,
    /// Events strictly inside the trial, in order.
    pub events: Vec<Event>,
    /// The answer that ended a direction-finding trial.
    pub answer_error: Option<f64>,
}

impl TrialSpan {
    pub fn is_complete(&self) -> bool {
        self.end.is_some()
    }
}

/// Splits a log into trials.
pub fn split_trials(log: &SessionLog) -> Vec<TrialSpan> {
    let mut out: Vec<TrialSpan> = Vec::new();
    let mut condition = log.header.condition;
    let mut open: Option<TrialSpan> = None;
    for e in log.events() {
        match *e {
            Event::TargetSpawn { t, target, x, y } => {
                if let Some(prev) = open.take() {
                    out.push(prev);
                }
                open = Some(TrialSpan {
                    index: out.len(),
                    target,
                    target_pos: Point::new(x, y),
                    start: t,
                    end: None,
                    condition,
                    events: Vec::new(),
                    answer_error: None,
                });
            }
            Event::Contact { t, .. } => {
                if let Some(mut tr) = open.take() {
                    tr.end = Some(t);
                    out.push(tr);
                }
            }
            Event::AnswerCommit { t, error_deg, .. } => {
                if let Some(mut tr) = open.take() {
                    tr.end = Some(t);
                    tr.answer_error = Some(error_deg);
                    out.push(tr);
                }
            }
            Event::ConditionChange { condition: c, .. } => {
                condition = c;
                if let Some(tr) = open.as_mut() {
                    tr.events.push(e.clone());
                }
            }
            _ => {
                if let Some(tr) = open.as_mut() {
                    tr.events.push(e.clone());
                }
            }
        }
    }
    out.extend(open);
    out
}

fn span_samples<'a>(samples: &'a [&'a TickSample], start: f64, end: f64) -> &'a [&'a TickSample] {
    let eps = 1e-9;
    let a = samples.partition_point(|s| s.t < start - eps);
    let b = samples.partition_point(|s| s.t <= end + eps);
    &samples[a..b.max(a)]
}

/// Path length walked between two times, from the logged positions.
pub fn travel_distance(log: &SessionLog, start: f64, end: f64) -> f64 {
    let samples: Vec<&TickSample> = log.samples().collect();
    path_length(span_samples(&samples, start, end))
}

fn path_length(s: &[&TickSample]) -> f64 {
    s.windows(2)
        .map(|w| (w[1].x - w[0].x).hypot(w[1].y - w[0].y))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub index: usize,
    pub condition: Condition,
    pub target: usize,
    pub class: TrialClass,
    pub wrong_turns: usize,
    pub choices: usize,
    pub travel_distance: f64,
    /// Shortest route from the cell the trial started in to the target cell.
    pub shortest_distance: f64,
    /// Distance from the start position to its cell center.
    pub start_offset: f64,
    /// Shortest route from the start position to the contact circle around
    /// the target. This is what an ideal walk covers.
    pub route_distance: f64,
    pub arrival_time: f64,
    pub front_back_err: bool,
}

/// Wrong flags of the crossroad choices of a trial, with the target
/// azimuth at each decision.
fn choices(span: &TrialSpan, world: &WorldSpec, field: &DistanceField) -> Vec<(bool, f64)> {
    let cs = world.cell_size();
    span.events
        .iter()
        .filter_map(|e| match *e {
            Event::CrossroadChoice {
                junction,
                exit,
                theta,
                ..
            } => {
                let wrong = match (field.get(junction), field.get(exit)) {
                    (Some(dj), Some(de)) => de + cs * cell_gap(junction, exit) > dj + 1e-9,
                    _ => true,
                };
                Some((wrong, theta))
            }
            _ => None,
        })
        .collect()
}

fn cell_gap(a: Cell, b: Cell) -> f64 {
    (a.i as f64 - b.i as f64).hypot(a.j as f64 - b.j as f64)
}

/// True when two or more wrong choices in a row were made with the target
/// behind.
pub fn detect_front_back_err(choices: &[(bool, f64)]) -> bool {
    let mut run = 0;
    for &(wrong, theta) in choices {
        if wrong && theta.abs() > 90.0 {
            run += 1;
            if run >= 2 {
                return true;
            }
        } else {
            run = 0;
        }
    }
    false
}

/// Classifies one completed navigation trial.
pub fn classify_trial(
    log: &SessionLog,
    span: &TrialSpan,
    world: &WorldSpec,
) -> Result<TrialOutcome, EvalError> {
    let mut cache = HashMap::new();
    let samples: Vec<&TickSample> = log.samples().collect();
    classify_with(&samples, span, world, &mut cache)
}

fn classify_with(
    samples: &[&TickSample],
    span: &TrialSpan,
    world: &WorldSpec,
    cache: &mut HashMap<Cell, DistanceField>,
) -> Result<TrialOutcome, EvalError> {
    let end = span.end.ok_or_else(|| {
        EvalError::Malformed(format!("trial {} has no contact event", span.index))
    })?;
    let goal = world
        .cell_of(span.target_pos)
        .filter(|&c| world.is_free(c))
        .ok_or_else(|| {
            EvalError::Malformed(format!("trial {} target outside free space", span.index))
        })?;
    let field = match cache.entry(goal) {
        std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
        std::collections::hash_map::Entry::Vacant(e) => e.insert(DistanceField::new(world, goal)?),
    };
    let own = span_samples(samples, span.start, end);
    let first = own
        .first()
        .ok_or_else(|| EvalError::Malformed(format!("trial {} has no samples", span.index)))?;
    let start_pos = Point::new(first.x, first.y);
    let start_cell = world
        .cell_of(start_pos)
        .ok_or_else(|| EvalError::Malformed(format!("trial {} starts off the map", span.index)))?;
    let shortest = field.get(start_cell).ok_or(EvalError::NoPath(
        (start_pos.x, start_pos.y),
        (span.target_pos.x, span.target_pos.y),
    ))?;
    let route = field
        .from_point(world, start_pos)
        .map_or(shortest, |d| (d - world.contact_radius()).max(0.0));
    let ch = choices(span, world, field);
    let wrong_turns = ch.iter().filter(|c| c.0).count();
    Ok(TrialOutcome {
        index: span.index,
        condition: span.condition,
        target: span.target,
        class: TrialClass::from_wrong_turns(wrong_turns),
        wrong_turns,
        choices: ch.len(),
        travel_distance: path_length(own),
        shortest_distance: shortest,
        start_offset: start_pos.dist(world.center(start_cell)),
        route_distance: route,
        arrival_time: end - span.start,
        front_back_err: detect_front_back_err(&ch),
    })
}

/// Classifies every completed trial of a navigation log. A trailing
/// unfinished trial is skipped; the count of skipped trials is returned.
pub fn classify_log(
    log: &SessionLog,
    world: &WorldSpec,
) -> Result<(Vec<TrialOutcome>, usize), EvalError> {
    if log.header.mode != Mode::Navigation {
        return Err(EvalError::Malformed("not a navigation log".into()));
    }
    let samples: Vec<&TickSample> = log.samples().collect();
    let mut cache = HashMap::new();
    let spans = split_trials(log);
    let mut out = Vec::with_capacity(spans.len());
    let mut skipped = 0;
    for (k, span) in spans.iter().enumerate() {
        if !span.is_complete() {
            if k + 1 == spans.len() {
                skipped += 1;
                continue;
            }
            return Err(EvalError::Malformed(format!(
                "trial {k} ends without contact"
            )));
        }
        out.push(classify_with(&samples, span, world, &mut cache)?);
    }
    Ok((out, skipped))
}

/// Signed answer errors of a direction-finding log, with their condition.
pub fn front_detect_errors(log: &SessionLog) -> Result<Vec<(Condition, f64)>, EvalError> {
    if log.header.mode != Mode::FrontDetect {
        return Err(EvalError::Malformed("not a front_detect log".into()));
    }
    Ok(split_trials(log)
        .into_iter()
        .filter_map(|s| s.answer_error.map(|e| (s.condition, e)))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontDetectSummary {
    pub n: usize,
    pub mean_abs: f64,
    /// Fraction of answers with |error| < 30 degrees.
    pub pct_within_30: f64,
}

pub fn front_detect_summary(errors: &[f64]) -> Result<FrontDetectSummary, EvalError> {
    if errors.is_empty() {
        return Err(EvalError::Domain("no answers to summarize".into()));
    }
    if let Some(e) = errors.iter().find(|e| !e.is_finite()) {
        return Err(EvalError::Domain(format!("non-finite error {e}")));
    }
    let n = errors.len();
    let mean_abs = errors.iter().map(|e| e.abs()).sum::<f64>() / n as f64;
    let within = errors.iter().filter(|e| e.abs() < 30.0).count();
    Ok(FrontDetectSummary {
        n,
        mean_abs,
        pct_within_30: within as f64 / n as f64,
    })
}
