//! Step detection from the height of a thigh-mounted tracker.

use serde::{Deserialize, Serialize};

/// Rise above the standing height that counts as a lifted leg.
pub const STEP_THRESHOLD_M: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepEvent {
    /// Time the leg came back down, seconds.
    pub onset: f64,
}

/// Streaming detector: a step completes when the height rises above
/// `baseline + threshold` and then falls back below it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDetector {
    level: f64,
    raised: bool,
}

impl StepDetector {
    pub fn new(baseline: f64, threshold: f64) -> Self {
        Self {
            level: baseline + threshold,
            raised: false,
        }
    }

    pub fn push(&mut self, height: f64, t: f64) -> Option<StepEvent> {
        if !height.is_finite() {
            return None;
        }
        if !self.raised {
            self.raised = height > self.level;
            None
        } else if height < self.level {
            self.raised = false;
            Some(StepEvent { onset: t })
        } else {
            None
        }
    }
}

/// Steps in a uniformly sampled height trace; sample `k` is at `k * tick`.
pub fn detect_steps(trace: &[f64], tick: f64, baseline: f64, threshold: f64) -> Vec<StepEvent> {
    let mut det = StepDetector::new(baseline, threshold);
    trace
        .iter()
        .enumerate()
        .filter_map(|(k, &h)| det.push(h, k as f64 * tick))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn excursion(peak: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|k| 0.9 + peak * (std::f64::consts::PI * k as f64 / (n - 1) as f64).sin())
            .collect()
    }

    #[test]
    fn examples() {
        let up12 = excursion(0.12, 21);
        assert_eq!(detect_steps(&up12, 0.033, 0.9, STEP_THRESHOLD_M).len(), 1);
        let up9 = excursion(0.09, 21);
        assert!(detect_steps(&up9, 0.033, 0.9, STEP_THRESHOLD_M).is_empty());
        let mut two = up12.clone();
        two.extend(excursion(0.15, 15));
        let steps = detect_steps(&two, 0.033, 0.9, STEP_THRESHOLD_M);
        assert_eq!(steps.len(), 2);
        assert!(steps[0].onset < steps[1].onset);
        assert!(detect_steps(&[], 0.033, 0.9, 0.1).is_empty());
    }

    #[test]
    fn step_completes_on_the_way_down() {
        let trace = [0.0, 0.05, 0.11, 0.2, 0.11, 0.09, 0.0];
        let steps = detect_steps(&trace, 0.1, 0.0, 0.1);
        assert_eq!(steps.len(), 1);
        assert!((steps[0].onset - 0.5).abs() < 1e-12);
        // a leg held up never completes
        assert!(detect_steps(&[0.0, 0.2, 0.2, 0.2], 0.1, 0.0, 0.1).is_empty());
    }
}
