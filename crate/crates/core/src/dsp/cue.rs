//! Arrival cues played when the avatar reaches a target.

use crate::world::Condition;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const VIBRATION_HZ: f64 = 10.0;
const VIBRATION_SECONDS: f64 = 1.0;
const PING_HZ: f64 = 1_000.0;
const PING_SECONDS: f64 = 0.3;
const PING_DECAY_SECONDS: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CueKind {
    /// Full-amplitude sine on both vibration channels.
    Vibration { freq_hz: f64, duration_s: f64 },
    /// Exponentially decaying tone on the audio channels.
    Ping {
        freq_hz: f64,
        duration_s: f64,
        decay_s: f64,
    },
}

impl CueKind {
    pub fn duration(&self) -> f64 {
        match *self {
            CueKind::Vibration { duration_s, .. } | CueKind::Ping { duration_s, .. } => duration_s,
        }
    }

    pub fn is_haptic(&self) -> bool {
        matches!(self, CueKind::Vibration { .. })
    }
}

pub fn arrival_cue(condition: Condition) -> CueKind {
    if condition.haptic_cue() {
        CueKind::Vibration {
            freq_hz: VIBRATION_HZ,
            duration_s: VIBRATION_SECONDS,
        }
    } else {
        CueKind::Ping {
            freq_hz: PING_HZ,
            duration_s: PING_SECONDS,
            decay_s: PING_DECAY_SECONDS,
        }
    }
}

/// Rendered mono cue samples.
#[derive(Debug, Clone, PartialEq)]
pub struct CueSignal {
    pub kind: CueKind,
    pub samples: Vec<f32>,
}

impl CueSignal {
    pub fn render(kind: CueKind, sample_rate: u32) -> Self {
        let fs = sample_rate as f64;
        let len = (fs * kind.duration()).round() as usize;
        let samples = (0..len)
            .map(|i| {
                let t = i as f64 / fs;
                let s = match kind {
                    CueKind::Vibration { freq_hz, .. } => (2.0 * PI * freq_hz * t).sin(),
                    CueKind::Ping {
                        freq_hz, decay_s, ..
                    } => (-t / decay_s).exp() * (2.0 * PI * freq_hz * t).sin(),
                };
                s as f32
            })
            .collect();
        Self { kind, samples }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cue_per_condition() {
        assert_eq!(
            arrival_cue(Condition::HapDir),
            CueKind::Vibration {
                freq_hz: 10.0,
                duration_s: 1.0
            }
        );
        assert!(arrival_cue(Condition::HapDirDist).is_haptic());
        assert!(matches!(arrival_cue(Condition::Nt), CueKind::Ping { .. }));
        assert!(matches!(
            arrival_cue(Condition::NtHap),
            CueKind::Ping { .. }
        ));
    }

    #[test]
    fn rendered_length() {
        for fs in [44_100, 48_000, 22_050] {
            for c in Condition::ALL {
                let kind = arrival_cue(c);
                let sig = CueSignal::render(kind, fs);
                assert_eq!(
                    sig.samples.len(),
                    (fs as f64 * kind.duration()).round() as usize
                );
            }
        }
        let vib = CueSignal::render(arrival_cue(Condition::HapDir), 48_000);
        let peak = vib.samples.iter().fold(0f32, |m, s| m.max(s.abs()));
        assert!((peak - 1.0).abs() < 1e-6);
    }
}
