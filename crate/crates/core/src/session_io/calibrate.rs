use super::{run_batch, IoError, RunConfig};
use crate::evaluation::{front_detect_errors, front_detect_summary};
use crate::world::{Condition, Mode, WorldSpec};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationPoint {
    pub amp_jnd: f64,
    pub mean_abs: f64,
    pub pct_within_30: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub target_mean_deg: f64,
    pub best: CalibrationPoint,
    pub sweep: Vec<CalibrationPoint>,
}

impl CalibrationResult {
    /// `[agent]` table to paste into a run config.
    pub fn config_fragment(&self, base: &RunConfig) -> String {
        let a = AgentFragment {
            agent: crate::agents::AgentParams {
                amp_jnd: self.best.amp_jnd,
                ..base.agent
            },
        };
        format!(
            "# front-detect mean |error| {:.2} deg, {:.1}% within 30 deg\n{}",
            self.best.mean_abs,
            100.0 * self.best.pct_within_30,
            toml::to_string(&a).unwrap_or_default()
        )
    }
}

#[derive(Serialize)]
struct AgentFragment {
    agent: crate::agents::AgentParams,
}

fn evaluate(
    base: &RunConfig,
    world: &Arc<WorldSpec>,
    jnd: f64,
) -> Result<CalibrationPoint, IoError> {
    let mut cfg = base.clone();
    cfg.mode = Mode::FrontDetect;
    cfg.conditions = vec![Condition::HapDir];
    cfg.render_audio = false;
    cfg.agent.amp_jnd = jnd;
    let run = run_batch(&cfg, world.clone())?;
    let errors: Vec<f64> = front_detect_errors(&run[0].log)?
        .into_iter()
        .map(|(_, e)| e)
        .collect();
    let s = front_detect_summary(&errors)?;
    Ok(CalibrationPoint {
        amp_jnd: jnd,
        mean_abs: s.mean_abs,
        pct_within_30: s.pct_within_30,
    })
}

/// Sweeps `amp_jnd` over `grid` on direction finding with the HapDir
/// condition, then refines once around the best point. Other agent
/// parameters, the seed and the trial count come from `base`.
pub fn calibrate_jnd(
    base: &RunConfig,
    world: &WorldSpec,
    grid: &[f64],
    target_mean_deg: f64,
) -> Result<CalibrationResult, IoError> {
    if grid.is_empty() {
        return Err(IoError::Config {
            line: None,
            field: Some("grid".into()),
            msg: "empty calibration grid".into(),
        });
    }
    let world = Arc::new(world.clone());
    let mut sweep = Vec::new();
    for &j in grid {
        sweep.push(evaluate(base, &world, j)?);
    }
    let closest = |pts: &[CalibrationPoint]| {
        *pts.iter()
            .min_by(|a, b| {
                (a.mean_abs - target_mean_deg)
                    .abs()
                    .total_cmp(&(b.mean_abs - target_mean_deg).abs())
            })
            .expect("non-empty")
    };
    let coarse = closest(&sweep);
    let step = if grid.len() > 1 {
        (grid[grid.len() - 1] - grid[0]).abs() / (grid.len() - 1) as f64
    } else {
        0.0
    };
    if step > 0.0 {
        for k in [-2.0, -1.0, 1.0, 2.0] {
            let j = coarse.amp_jnd + k * step / 4.0;
            if j >= 0.0 {
                sweep.push(evaluate(base, &world, j)?);
            }
        }
    }
    sweep.sort_by(|a, b| a.amp_jnd.total_cmp(&b.amp_jnd));
    Ok(CalibrationResult {
        target_mean_deg,
        best: closest(&sweep),
        sweep,
    })
}
