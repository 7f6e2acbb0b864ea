//! Grouped multi-track stimuli and a synthetic music generator.

use super::{normalize_loudness, DspError, StereoBuffer};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrackGroup {
    Vox,
    Inst,
    Mix,
}

impl TrackGroup {
    pub const ALL: [TrackGroup; 3] = [TrackGroup::Vox, TrackGroup::Inst, TrackGroup::Mix];

    pub fn name(&self) -> &'static str {
        match self {
            TrackGroup::Vox => "vox",
            TrackGroup::Inst => "inst",
            TrackGroup::Mix => "mix",
        }
    }
}

/// Vox and Inst groups plus their sample-wise sum.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiTrack {
    vox: StereoBuffer,
    inst: StereoBuffer,
    mix: StereoBuffer,
}

impl MultiTrack {
    pub fn new(vox: StereoBuffer, inst: StereoBuffer) -> Result<Self, DspError> {
        if vox.sample_rate != inst.sample_rate {
            return Err(DspError::LengthMismatch(format!(
                "sample rates {} vs {}",
                vox.sample_rate, inst.sample_rate
            )));
        }
        if vox.samples.len() != inst.samples.len() {
            return Err(DspError::LengthMismatch(format!(
                "vox {} frames vs inst {} frames",
                vox.frames(),
                inst.frames()
            )));
        }
        let mix = StereoBuffer {
            sample_rate: vox.sample_rate,
            samples: vox
                .samples
                .iter()
                .zip(&inst.samples)
                .map(|(a, b)| a + b)
                .collect(),
        };
        Ok(Self { vox, inst, mix })
    }

    pub fn sample_rate(&self) -> u32 {
        self.vox.sample_rate
    }

    pub fn frames(&self) -> usize {
        self.vox.frames()
    }

    pub fn group(&self, g: TrackGroup) -> &StereoBuffer {
        match g {
            TrackGroup::Vox => &self.vox,
            TrackGroup::Inst => &self.inst,
            TrackGroup::Mix => &self.mix,
        }
    }
}

/// Parameters of the synthetic stimulus: a kick pattern and bass line in the
/// instrument group, a vocal-band melody in the vox group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StimulusParams {
    pub sample_rate: u32,
    pub seconds: f64,
    pub bpm: f64,
    pub seed: u64,
    /// Loudness each group is normalized to before mixing.
    pub vox_lufs: f64,
    pub inst_lufs: f64,
}

impl Default for StimulusParams {
    fn default() -> Self {
        Self {
            sample_rate: 48_000,
            seconds: 8.0,
            bpm: 120.0,
            seed: 7,
            vox_lufs: -14.0,
            inst_lufs: -14.0,
        }
    }
}

// A minor pentatonic, bass and vocal registers.
const BASS_NOTES: [f64; 4] = [55.0, 65.41, 73.42, 82.41];
const VOX_NOTES: [f64; 5] = [220.0, 261.63, 293.66, 329.63, 392.0];

impl StimulusParams {
    pub fn generate(&self) -> Result<MultiTrack, DspError> {
        if self.sample_rate < 8_000 {
            return Err(DspError::SampleRate(self.sample_rate as f64));
        }
        if !(self.seconds.is_finite() && self.seconds >= 0.5) {
            return Err(DspError::TooShort(format!("{} s stimulus", self.seconds)));
        }
        if !(self.bpm.is_finite() && self.bpm > 0.0) {
            return Err(DspError::Domain("bpm", self.bpm));
        }
        let fs = self.sample_rate as f64;
        let n = (fs * self.seconds) as usize;
        let beat = 60.0 / self.bpm;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let bars = (self.seconds / (4.0 * beat)).ceil() as usize + 1;
        let bass_line: Vec<f64> = (0..bars)
            .map(|_| BASS_NOTES[rng.random_range(0..BASS_NOTES.len())])
            .collect();
        let beats = (self.seconds / beat).ceil() as usize + 1;
        let melody: Vec<f64> = (0..beats)
            .map(|_| VOX_NOTES[rng.random_range(0..VOX_NOTES.len())])
            .collect();

        let mut inst = Vec::with_capacity(n);
        let mut vox = Vec::with_capacity(n);
        let (mut bass_phase, mut vox_phase) = (0.0f64, 0.0f64);
        for i in 0..n {
            let t = i as f64 / fs;
            let beat_idx = (t / beat) as usize;
            let tb = t - beat_idx as f64 * beat;
            // kick: pitch sweep 90 -> 45 Hz with a fast decay
            let kick_f = 45.0 + 45.0 * (-tb / 0.03).exp();
            let kick = (-tb / 0.12).exp() * (2.0 * PI * kick_f * tb).sin();
            let bass_f = bass_line[beat_idx / 4];
            bass_phase = (bass_phase + 2.0 * PI * bass_f / fs) % (2.0 * PI);
            let bass = 0.6 * bass_phase.sin() + 0.2 * (2.0 * bass_phase).sin();
            inst.push((0.7 * kick + 0.5 * bass) as f32);

            let vib = 1.0 + 0.01 * (2.0 * PI * 5.5 * t).sin();
            vox_phase = (vox_phase + 2.0 * PI * melody[beat_idx] * vib / fs) % (2.0 * PI);
            let env = (tb / 0.02).min(1.0) * (1.0 - 0.3 * tb / beat);
            let v = vox_phase.sin() + 0.4 * (2.0 * vox_phase).sin() + 0.2 * (3.0 * vox_phase).sin();
            vox.push((0.4 * env * v) as f32);
        }
        let inst = StereoBuffer::from_channels(self.sample_rate, &inst, &inst)?;
        let vox = StereoBuffer::from_channels(self.sample_rate, &vox, &vox)?;
        let inst = normalize_loudness(&inst, self.inst_lufs)?.buffer;
        let vox = normalize_loudness(&vox, self.vox_lufs)?.buffer;
        MultiTrack::new(vox, inst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::integrated_loudness;

    #[test]
    fn mix_is_sum() {
        let mt = StimulusParams {
            seconds: 2.0,
            ..Default::default()
        }
        .generate()
        .unwrap();
        let (v, i, m) = (
            mt.group(TrackGroup::Vox),
            mt.group(TrackGroup::Inst),
            mt.group(TrackGroup::Mix),
        );
        for k in 0..m.samples.len() {
            assert!((m.samples[k] - (v.samples[k] + i.samples[k])).abs() <= 1e-6);
        }
    }

    #[test]
    fn groups_hit_requested_loudness() {
        let p = StimulusParams {
            seconds: 4.0,
            vox_lufs: -18.9,
            inst_lufs: -18.4,
            ..Default::default()
        };
        let mt = p.generate().unwrap();
        let v = integrated_loudness(mt.group(TrackGroup::Vox))
            .unwrap()
            .lufs()
            .unwrap();
        let i = integrated_loudness(mt.group(TrackGroup::Inst))
            .unwrap()
            .lufs()
            .unwrap();
        assert!((v + 18.9).abs() < 0.1, "{v}");
        assert!((i + 18.4).abs() < 0.1, "{i}");
    }

    #[test]
    fn deterministic_and_validated() {
        let p = StimulusParams {
            seconds: 1.0,
            ..Default::default()
        };
        assert_eq!(p.generate().unwrap(), p.generate().unwrap());
        let bad = StimulusParams {
            seconds: 0.1,
            ..Default::default()
        };
        assert!(bad.generate().is_err());
        let a = StereoBuffer::silence(48_000, 10);
        let b = StereoBuffer::silence(44_100, 10);
        assert!(MultiTrack::new(a.clone(), b).is_err());
        assert!(MultiTrack::new(a, StereoBuffer::silence(48_000, 11)).is_err());
    }
}
