//! Total harmonic distortion from a Hann-windowed periodogram.

use super::DspError;
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

pub const DEFAULT_HARMONICS: usize = 6;

// Half-width (in bins) of the band summed around each spectral line. The Hann
// main lobe spans +/-2 bins; one extra bin absorbs off-bin leakage.
const LINE_HALF_WIDTH: usize = 3;
// The fundamental must sit far enough from DC that its band and the
// harmonic bands do not overlap.
const MIN_FUNDAMENTAL_BIN: usize = 2 * LINE_HALF_WIDTH + 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEstimate {
    pub fundamental_hz: f64,
    /// RMS amplitude of the fundamental.
    pub v0: f64,
    /// RMS amplitudes of harmonics 2..=n, in order. Harmonics above Nyquist
    /// are omitted.
    pub harmonics: Vec<f64>,
}

impl SpectrumEstimate {
    pub fn thd(&self) -> f64 {
        self.harmonics.iter().map(|v| v * v).sum::<f64>().sqrt() / self.v0
    }
}

/// Estimates the fundamental (largest non-DC peak) and the RMS amplitudes of
/// harmonics 2 through `n_harmonics`.
pub fn spectrum_estimate(
    signal: &[f64],
    sample_rate: f64,
    n_harmonics: usize,
) -> Result<SpectrumEstimate, DspError> {
    if !(sample_rate.is_finite() && sample_rate > 0.0) {
        return Err(DspError::SampleRate(sample_rate));
    }
    let n = signal.len();
    if n < 4 * MIN_FUNDAMENTAL_BIN {
        return Err(DspError::TooShort(format!("{n} samples")));
    }
    let mean = signal.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex<f64>> = signal
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let w = 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / n as f64).cos();
            Complex::new((x - mean) * w, 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let half = n / 2;
    let power: Vec<f64> = buf[..=half].iter().map(|c| c.norm_sqr()).collect();

    let input_ms = signal.iter().map(|x| x * x).sum::<f64>() / n as f64;
    let (peak_bin, peak) = power
        .iter()
        .enumerate()
        .skip(MIN_FUNDAMENTAL_BIN.saturating_sub(LINE_HALF_WIDTH))
        .fold(
            (0, 0.0),
            |best, (i, &p)| if p > best.1 { (i, p) } else { best },
        );
    // A line 180 dB below the input level is rounding noise, not a tone.
    let peak_ms = peak * 16.0 / (3.0 * n as f64 * n as f64);
    if !(peak > 0.0) || peak_ms <= 1e-18 * input_ms || peak_bin == 0 {
        return Err(DspError::NoFundamental);
    }
    if peak_bin < MIN_FUNDAMENTAL_BIN || peak_bin + LINE_HALF_WIDTH > half {
        return Err(DspError::TooShort(format!(
            "fundamental at bin {peak_bin} cannot be resolved"
        )));
    }

    // Gaussian interpolation on log power refines the fundamental location.
    let (lm, c, rp) = (
        power[peak_bin - 1].max(1e-300).ln(),
        power[peak_bin].ln(),
        power[peak_bin + 1].max(1e-300).ln(),
    );
    let denom = lm - 2.0 * c + rp;
    let delta = if denom.abs() > 0.0 {
        (0.5 * (lm - rp) / denom).clamp(-0.5, 0.5)
    } else {
        0.0
    };
    let f0_bin = peak_bin as f64 + delta;

    // A Hann-windowed sine of amplitude A puts A^2 N^2 * 3/32 into its lobe.
    let scale = 16.0 / (3.0 * n as f64 * n as f64);
    let line_rms = |center: f64| -> f64 {
        let c = center.round() as usize;
        let lo = c.saturating_sub(LINE_HALF_WIDTH).max(1);
        let hi = (c + LINE_HALF_WIDTH).min(half);
        let energy: f64 = power[lo..=hi].iter().sum();
        (energy * scale).sqrt()
    };

    let v0 = line_rms(f0_bin);
    let harmonics = (2..=n_harmonics)
        .map(|k| k as f64 * f0_bin)
        .take_while(|&b| b.round() as usize + LINE_HALF_WIDTH <= half)
        .map(line_rms)
        .collect();
    Ok(SpectrumEstimate {
        fundamental_hz: f0_bin * sample_rate / n as f64,
        v0,
        harmonics,
    })
}

/// THD as a ratio: root-sum-square of harmonics 2..=n over the fundamental.
pub fn thd(signal: &[f64], sample_rate: f64, n_harmonics: usize) -> Result<f64, DspError> {
    Ok(spectrum_estimate(signal, sample_rate, n_harmonics)?.thd())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tone(fs: f64, n: usize, parts: &[(f64, f64)]) -> Vec<f64> {
        (0..n)
            .map(|i| {
                let t = i as f64 / fs;
                parts
                    .iter()
                    .map(|&(f, a)| a * (2.0 * PI * f * t).sin())
                    .sum()
            })
            .collect()
    }

    #[test]
    fn pure_sine_has_no_distortion() {
        let x = tone(48_000.0, 48_000, &[(1_000.0, 0.8)]);
        assert!(thd(&x, 48_000.0, 6).unwrap() < 1e-6);
    }

    #[test]
    fn off_bin_second_harmonic() {
        let x = tone(48_000.0, 48_000, &[(997.3, 1.0), (2.0 * 997.3, 0.1)]);
        let est = spectrum_estimate(&x, 48_000.0, 6).unwrap();
        assert!((est.thd() - 0.1).abs() < 1e-3, "{}", est.thd());
        assert!((est.fundamental_hz - 997.3).abs() < 0.5);
        assert!((est.v0 - 1.0 / 2f64.sqrt()).abs() < 0.01);
    }

    #[test]
    fn flat_signals_have_no_fundamental() {
        assert!(matches!(
            thd(&vec![0.0; 4096], 48_000.0, 6),
            Err(DspError::NoFundamental)
        ));
        assert!(matches!(
            thd(&vec![0.3; 4096], 48_000.0, 6),
            Err(DspError::NoFundamental)
        ));
    }

    #[test]
    fn harmonics_above_nyquist_are_skipped() {
        let x = tone(8_000.0, 8_000, &[(1_500.0, 1.0)]);
        let est = spectrum_estimate(&x, 8_000.0, 6).unwrap();
        assert_eq!(est.harmonics.len(), 1);
    }
}
