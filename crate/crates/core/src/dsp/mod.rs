//! Audio and vibration signal processing.

mod attenuation;
mod cue;
mod loudness;
mod pan;
mod render;
mod stimulus;
mod thd;
mod vibration;
pub mod wav;

pub use attenuation::{shear_wave_attenuation, AttenuationModel};
pub use cue::{arrival_cue, CueKind, CueSignal};
pub use loudness::{
    integrated_loudness, normalize_loudness, Loudness, LoudnessMeter, Normalized,
    DEFAULT_TARGET_LUFS,
};
pub use pan::{pan_powers, spatialize_vox};
pub use render::{BlockRenderer, RenderStats, DEFAULT_BLOCK_SIZE};
pub use stimulus::{MultiTrack, StimulusParams, TrackGroup};
pub use thd::{spectrum_estimate, thd, SpectrumEstimate, DEFAULT_HARMONICS};
pub use vibration::{acc_rms, TriaxialRecording};

use crate::modulation::GainPair;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DspError {
    #[error("signal is empty or too short: {0}")]
    TooShort(String),
    #[error("channel lengths differ: {0}")]
    LengthMismatch(String),
    #[error("invalid sample rate {0}")]
    SampleRate(f64),
    #[error("no detectable fundamental")]
    NoFundamental,
    #[error("input is below the loudness gate and cannot be normalized")]
    BelowGate,
    #[error("{0} must be finite and non-negative, got {1}")]
    Domain(&'static str, f64),
    #[error("unsupported audio format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One left/right sample pair.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StereoFrame {
    pub left: f64,
    pub right: f64,
}

impl StereoFrame {
    pub const fn new(left: f64, right: f64) -> Self {
        Self { left, right }
    }
}

/// Scales each channel by its gain. No clipping.
#[inline]
pub fn apply_gains(frame: StereoFrame, g: GainPair) -> StereoFrame {
    StereoFrame {
        left: frame.left * g.left,
        right: frame.right * g.right,
    }
}

/// Interleaved stereo audio.
#[derive(Debug, Clone, PartialEq)]
pub struct StereoBuffer {
    pub sample_rate: u32,
    /// `[l0, r0, l1, r1, ...]`
    pub samples: Vec<f32>,
}

impl StereoBuffer {
    pub fn new(sample_rate: u32, samples: Vec<f32>) -> Result<Self, DspError> {
        if sample_rate == 0 {
            return Err(DspError::SampleRate(0.0));
        }
        if !samples.len().is_multiple_of(2) {
            return Err(DspError::LengthMismatch(
                "interleaved stereo needs an even sample count".into(),
            ));
        }
        Ok(Self {
            sample_rate,
            samples,
        })
    }

    pub fn from_channels(sample_rate: u32, left: &[f32], right: &[f32]) -> Result<Self, DspError> {
        if left.len() != right.len() {
            return Err(DspError::LengthMismatch(format!(
                "left {} vs right {}",
                left.len(),
                right.len()
            )));
        }
        let samples = left.iter().zip(right).flat_map(|(&l, &r)| [l, r]).collect();
        Self::new(sample_rate, samples)
    }

    pub fn silence(sample_rate: u32, frames: usize) -> Self {
        Self {
            sample_rate,
            samples: vec![0.0; frames * 2],
        }
    }

    pub fn frames(&self) -> usize {
        self.samples.len() / 2
    }

    pub fn duration(&self) -> f64 {
        self.frames() as f64 / self.sample_rate as f64
    }

    pub fn frame(&self, i: usize) -> StereoFrame {
        StereoFrame::new(self.samples[2 * i] as f64, self.samples[2 * i + 1] as f64)
    }

    pub fn channel(&self, ch: usize) -> impl Iterator<Item = f32> + '_ {
        self.samples.iter().skip(ch).step_by(2).copied()
    }

    pub fn scaled(&self, gain: f64) -> Self {
        Self {
            sample_rate: self.sample_rate,
            samples: self
                .samples
                .iter()
                .map(|&s| (s as f64 * gain) as f32)
                .collect(),
        }
    }

    pub fn peak(&self) -> f32 {
        self.samples.iter().fold(0.0f32, |m, s| m.max(s.abs()))
    }
}
