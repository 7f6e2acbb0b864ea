//! Transmitted-vibration magnitude from triaxial accelerometer data.

use super::DspError;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriaxialRecording {
    pub sample_rate: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

impl TriaxialRecording {
    pub fn new(sample_rate: f64, x: Vec<f64>, y: Vec<f64>, z: Vec<f64>) -> Result<Self, DspError> {
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(DspError::SampleRate(sample_rate));
        }
        if x.len() != y.len() || y.len() != z.len() {
            return Err(DspError::LengthMismatch(format!(
                "x={} y={} z={}",
                x.len(),
                y.len(),
                z.len()
            )));
        }
        Ok(Self {
            sample_rate,
            x,
            y,
            z,
        })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// Mean-removed RMS of one axis.
fn axis_rms(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mu = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / n).sqrt()
}

/// Sum of the three per-axis RMS values, in m/s^2.
pub fn acc_rms(rec: &TriaxialRecording) -> Result<f64, DspError> {
    if rec.len() < 2 {
        return Err(DspError::TooShort(format!("{} samples", rec.len())));
    }
    Ok(axis_rms(&rec.x) + axis_rms(&rec.y) + axis_rms(&rec.z))
}
