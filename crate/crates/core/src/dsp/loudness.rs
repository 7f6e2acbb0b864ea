//! Gated integrated loudness (BS.1770-4), stereo only.

use super::{DspError, StereoBuffer};
use serde::{Deserialize, Serialize};

pub const DEFAULT_TARGET_LUFS: f64 = -14.0;

const ABSOLUTE_GATE_LUFS: f64 = -70.0;
const RELATIVE_GATE_LU: f64 = -10.0;
const BLOCK_SECONDS: f64 = 0.4;
// 400 ms blocks with 75% overlap = four 100 ms hops per block
const HOPS_PER_BLOCK: usize = 4;

/// Biquad with a0 normalized to 1, transposed direct form II.
#[derive(Debug, Clone)]
struct Biquad {
    b0: f64,
    b1: f64,
    b2: f64,
    a1: f64,
    a2: f64,
    s1: f64,
    s2: f64,
}

impl Biquad {
    fn new(b: [f64; 3], a: [f64; 2]) -> Self {
        Self {
            b0: b[0],
            b1: b[1],
            b2: b[2],
            a1: a[0],
            a2: a[1],
            s1: 0.0,
            s2: 0.0,
        }
    }

    /// High-shelf stage of the K-weighting pre-filter.
    fn shelf(sample_rate: f64) -> Self {
        let gain_db = 3.999_843_853_973_347;
        let q = 0.707_175_236_955_419_3;
        let fc = 1_681.974_450_955_532;
        let k = (std::f64::consts::PI * fc / sample_rate).tan();
        let vh = 10f64.powf(gain_db / 20.0);
        let vb = vh.powf(0.499_666_774_154_541_6);
        let a0 = 1.0 + k / q + k * k;
        Self::new(
            [
                (vh + vb * k / q + k * k) / a0,
                2.0 * (k * k - vh) / a0,
                (vh - vb * k / q + k * k) / a0,
            ],
            [2.0 * (k * k - 1.0) / a0, (1.0 - k / q + k * k) / a0],
        )
    }

    /// RLB high-pass stage.
    fn rlb(sample_rate: f64) -> Self {
        let q = 0.500_327_037_325_395_3;
        let fc = 38.135_470_876_139_82;
        let k = (std::f64::consts::PI * fc / sample_rate).tan();
        let a0 = 1.0 + k / q + k * k;
        Self::new(
            [1.0, -2.0, 1.0],
            [2.0 * (k * k - 1.0) / a0, (1.0 - k / q + k * k) / a0],
        )
    }

    #[inline(always)]
    fn process(&mut self, x: f64) -> f64 {
        let y = self.b0 * x + self.s1;
        self.s1 = self.b1 * x - self.a1 * y + self.s2;
        self.s2 = self.b2 * x - self.a2 * y;
        y
    }
}

#[derive(Debug, Clone)]
struct KWeighting {
    shelf: Biquad,
    rlb: Biquad,
}

impl KWeighting {
    fn new(sample_rate: f64) -> Self {
        Self {
            shelf: Biquad::shelf(sample_rate),
            rlb: Biquad::rlb(sample_rate),
        }
    }

    #[inline(always)]
    fn process(&mut self, x: f64) -> f64 {
        self.rlb.process(self.shelf.process(x))
    }
}

/// Result of a loudness measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Loudness {
    Lufs(f64),
    /// Every block fell below the absolute gate.
    BelowGate,
}

impl Loudness {
    pub fn lufs(&self) -> Option<f64> {
        match *self {
            Loudness::Lufs(v) => Some(v),
            Loudness::BelowGate => None,
        }
    }
}

impl std::fmt::Display for Loudness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Loudness::Lufs(v) => write!(f, "{v:.2} LUFS"),
            Loudness::BelowGate => f.write_str("below gate"),
        }
    }
}

/// Streaming stereo loudness accumulator.
///
/// Keeps the mean square of every 100 ms hop per channel; gating happens
/// in [`LoudnessMeter::integrated`].
#[derive(Debug, Clone)]
pub struct LoudnessMeter {
    sample_rate: u32,
    hop_len: usize,
    filters: [KWeighting; 2],
    acc: [f64; 2],
    acc_len: usize,
    hops: Vec<[f64; 2]>,
    frames: usize,
}

impl LoudnessMeter {
    pub fn new(sample_rate: u32) -> Result<Self, DspError> {
        if sample_rate < 100 {
            return Err(DspError::SampleRate(sample_rate as f64));
        }
        let fs = sample_rate as f64;
        Ok(Self {
            sample_rate,
            hop_len: (fs * BLOCK_SECONDS / HOPS_PER_BLOCK as f64).round() as usize,
            filters: [KWeighting::new(fs), KWeighting::new(fs)],
            acc: [0.0; 2],
            acc_len: 0,
            hops: Vec::new(),
            frames: 0,
        })
    }

    pub fn push_frame(&mut self, left: f64, right: f64) {
        let l = self.filters[0].process(left);
        let r = self.filters[1].process(right);
        self.acc[0] += l * l;
        self.acc[1] += r * r;
        self.acc_len += 1;
        self.frames += 1;
        if self.acc_len == self.hop_len {
            let n = self.hop_len as f64;
            self.hops.push([self.acc[0] / n, self.acc[1] / n]);
            self.acc = [0.0; 2];
            self.acc_len = 0;
        }
    }

    pub fn push_interleaved(&mut self, samples: &[f32]) {
        for fr in samples.chunks_exact(2) {
            self.push_frame(fr[0] as f64, fr[1] as f64);
        }
    }

    /// Mean-square power of each 400 ms gating block (channels summed with
    /// unit weights).
    fn block_powers(&self) -> Vec<f64> {
        self.hops
            .windows(HOPS_PER_BLOCK)
            .map(|w| w.iter().map(|h| h[0] + h[1]).sum::<f64>() / HOPS_PER_BLOCK as f64)
            .collect()
    }

    pub fn integrated(&self) -> Result<Loudness, DspError> {
        let min_frames = (self.sample_rate as f64 * BLOCK_SECONDS).round() as usize;
        if self.frames < min_frames || self.hops.len() < HOPS_PER_BLOCK {
            return Err(DspError::TooShort(format!(
                "loudness needs at least {BLOCK_SECONDS} s of audio"
            )));
        }
        let blocks = self.block_powers();
        let abs_gated: Vec<f64> = blocks
            .iter()
            .copied()
            .filter(|&z| power_to_lufs(z) > ABSOLUTE_GATE_LUFS)
            .collect();
        if abs_gated.is_empty() {
            return Ok(Loudness::BelowGate);
        }
        let relative_gate = power_to_lufs(mean(&abs_gated)) + RELATIVE_GATE_LU;
        let rel_gated: Vec<f64> = abs_gated
            .into_iter()
            .filter(|&z| power_to_lufs(z) > relative_gate)
            .collect();
        if rel_gated.is_empty() {
            return Ok(Loudness::BelowGate);
        }
        Ok(Loudness::Lufs(power_to_lufs(mean(&rel_gated))))
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn power_to_lufs(z: f64) -> f64 {
    if z <= 0.0 {
        f64::NEG_INFINITY
    } else {
        -0.691 + 10.0 * z.log10()
    }
}

pub fn integrated_loudness(track: &StereoBuffer) -> Result<Loudness, DspError> {
    let mut meter = LoudnessMeter::new(track.sample_rate)?;
    meter.push_interleaved(&track.samples);
    meter.integrated()
}

#[derive(Debug, Clone)]
pub struct Normalized {
    pub buffer: StereoBuffer,
    pub gain: f64,
    pub before_lufs: f64,
}

/// Applies one scalar gain so the track measures `target_lufs`.
pub fn normalize_loudness(track: &StereoBuffer, target_lufs: f64) -> Result<Normalized, DspError> {
    let before = integrated_loudness(track)?
        .lufs()
        .ok_or(DspError::BelowGate)?;
    let gain = 10f64.powf((target_lufs - before) / 20.0);
    Ok(Normalized {
        buffer: track.scaled(gain),
        gain,
        before_lufs: before,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine(fs: u32, freq: f64, amp: f64, secs: f64) -> Vec<f32> {
        let n = (fs as f64 * secs) as usize;
        (0..n)
            .map(|i| {
                (amp * (2.0 * std::f64::consts::PI * freq * i as f64 / fs as f64).sin()) as f32
            })
            .collect()
    }

    #[test]
    fn formula_coefficients_match_published_48k_values() {
        let s = Biquad::shelf(48_000.0);
        assert!((s.b0 - 1.535_124_859_586_97).abs() < 1e-9);
        assert!((s.b1 + 2.691_696_189_406_38).abs() < 1e-9);
        assert!((s.b2 - 1.198_392_810_852_85).abs() < 1e-9);
        assert!((s.a1 + 1.690_659_293_182_41).abs() < 1e-9);
        assert!((s.a2 - 0.732_480_774_215_85).abs() < 1e-9);
        let h = Biquad::rlb(48_000.0);
        assert!((h.a1 + 1.990_047_454_833_98).abs() < 1e-9);
        assert!((h.a2 - 0.990_072_250_366_21).abs() < 1e-9);
    }

    #[test]
    fn silence_is_below_gate() {
        let track = StereoBuffer::silence(48_000, 48_000);
        assert_eq!(integrated_loudness(&track).unwrap(), Loudness::BelowGate);
        assert!(matches!(
            normalize_loudness(&track, -14.0),
            Err(DspError::BelowGate)
        ));
    }

    #[test]
    fn too_short_is_an_error() {
        let track = StereoBuffer::silence(48_000, 10_000);
        assert!(matches!(
            integrated_loudness(&track),
            Err(DspError::TooShort(_))
        ));
    }

    #[test]
    fn normalize_fixed_point() {
        let l = sine(48_000, 440.0, 0.3, 3.0);
        let track = StereoBuffer::from_channels(48_000, &l, &l).unwrap();
        let once = normalize_loudness(&track, -14.0).unwrap();
        let twice = normalize_loudness(&once.buffer, -14.0).unwrap();
        assert!((twice.gain - 1.0).abs() < 0.012);
        let after = integrated_loudness(&twice.buffer).unwrap().lufs().unwrap();
        assert!((after + 14.0).abs() < 0.1);
    }
}
