use super::DspError;
use serde::{Deserialize, Serialize};

/// Exponential magnitude decay of a skin-borne vibration with distance and
/// frequency. Phase and dispersion are not modelled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttenuationModel {
    /// Damping constant in 1/(m*Hz).
    pub alpha_damp: f64,
}

impl AttenuationModel {
    pub fn new(alpha_damp: f64) -> Result<Self, DspError> {
        if !(alpha_damp.is_finite() && alpha_damp >= 0.0) {
            return Err(DspError::Domain("alpha_damp", alpha_damp));
        }
        Ok(Self { alpha_damp })
    }
}

/// Amplitude factor `exp(-alpha * x * f)` at distance `x` (m) and frequency
/// `f` (Hz).
pub fn shear_wave_attenuation(x: f64, f: f64, model: &AttenuationModel) -> Result<f64, DspError> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(DspError::Domain("distance", x));
    }
    if !(f.is_finite() && f >= 0.0) {
        return Err(DspError::Domain("frequency", f));
    }
    Ok((-model.alpha_damp * x * f).exp())
}
