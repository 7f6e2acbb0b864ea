//! Polar-coordinate gain law for stereo vibration balance.
//!
//! Angles are in degrees, positive to the user's left, and live in the
//! half-open interval (-180, 180]. World headings are measured
//! counter-clockwise from the +x axis, so a positive turn is a left turn.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModulationError {
    #[error("angle {0} is not finite")]
    NonFiniteAngle(f64),
    #[error("azimuth {0} outside (-180, 180]; wrap it first")]
    AzimuthOutOfRange(f64),
    #[error("distance {0} must be finite and non-negative")]
    NegativeDistance(f64),
    #[error("invalid modulation config: {0}")]
    InvalidConfig(String),
}

/// Wraps an angle into (-180, 180].
pub fn wrap_angle(deg: f64) -> Result<f64, ModulationError> {
    if !deg.is_finite() {
        return Err(ModulationError::NonFiniteAngle(deg));
    }
    let mut r = deg.rem_euclid(360.0);
    // rem_euclid can round up to exactly 360 for tiny negative inputs
    if r >= 360.0 {
        r -= 360.0;
    }
    Ok(if r > 180.0 { r - 360.0 } else { r })
}

/// User-relative target location.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarTarget {
    r: f64,
    theta: f64,
}

impl PolarTarget {
    /// Builds a target, wrapping `theta` into (-180, 180].
    pub fn new(r: f64, theta: f64) -> Result<Self, ModulationError> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(ModulationError::NegativeDistance(r));
        }
        Ok(Self {
            r,
            theta: wrap_angle(theta)?,
        })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulationConfig {
    pub c_max: f64,
    pub c_min: f64,
    /// Attenuation slope in 1/m.
    pub alpha: f64,
    /// When false the distance term is pinned to 1 (direction-only mode).
    pub distance_enabled: bool,
}

impl ModulationConfig {
    pub fn new(
        c_max: f64,
        c_min: f64,
        alpha: f64,
        distance_enabled: bool,
    ) -> Result<Self, ModulationError> {
        let cfg = Self {
            c_max,
            c_min,
            alpha,
            distance_enabled,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Picks alpha so that the floor `c_min / c_max` is reached exactly at
    /// `reach` meters.
    pub fn with_reach(c_max: f64, c_min: f64, reach: f64) -> Result<Self, ModulationError> {
        if !(reach.is_finite() && reach > 0.0) {
            return Err(ModulationError::InvalidConfig(format!(
                "reach must be positive, got {reach}"
            )));
        }
        if !(c_max > 0.0) {
            return Err(ModulationError::InvalidConfig(format!(
                "c_max must be positive, got {c_max}"
            )));
        }
        let alpha = (1.0 - c_min / c_max) / reach;
        Self::new(c_max, c_min, alpha, true)
    }

    pub fn validate(&self) -> Result<(), ModulationError> {
        let finite = self.c_max.is_finite() && self.c_min.is_finite() && self.alpha.is_finite();
        if !finite {
            return Err(ModulationError::InvalidConfig(
                "non-finite parameter".into(),
            ));
        }
        if !(self.c_max > 0.0) {
            return Err(ModulationError::InvalidConfig(format!(
                "c_max must be > 0, got {}",
                self.c_max
            )));
        }
        if !(0.0 <= self.c_min && self.c_min <= self.c_max) {
            return Err(ModulationError::InvalidConfig(format!(
                "need 0 <= c_min <= c_max, got c_min={} c_max={}",
                self.c_min, self.c_max
            )));
        }
        if !(self.alpha > 0.0) {
            return Err(ModulationError::InvalidConfig(format!(
                "alpha must be > 0, got {}",
                self.alpha
            )));
        }
        Ok(())
    }

    /// Same parameters with the distance term switched off.
    pub fn direction_only(mut self) -> Self {
        self.distance_enabled = false;
        self
    }

    /// Distance at which the gain floor is reached.
    pub fn floor_distance(&self) -> f64 {
        (1.0 - self.c_min / self.c_max) / self.alpha
    }
}

impl Default for ModulationConfig {
    fn default() -> Self {
        Self {
            c_max: 1.0,
            c_min: 0.2,
            alpha: 0.1,
            distance_enabled: true,
        }
    }
}

/// Final left/right vibration amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GainPair {
    pub left: f64,
    pub right: f64,
}

impl GainPair {
    pub const fn new(left: f64, right: f64) -> Self {
        Self { left, right }
    }

    pub fn sum(&self) -> f64 {
        self.left + self.right
    }
}

/// Piecewise-linear stereo balance. Returns `(a_left, a_right)`.
///
/// At exactly 180 the piecewise form puts the full weight on the left
/// channel; -180 never reaches this function because it wraps to 180.
pub fn direction_gains(theta: f64) -> Result<(f64, f64), ModulationError> {
    if !theta.is_finite() {
        return Err(ModulationError::NonFiniteAngle(theta));
    }
    if !(theta > -180.0 && theta <= 180.0) {
        return Err(ModulationError::AzimuthOutOfRange(theta));
    }
    let (left, right) = if theta <= -90.0 {
        (0.0, 1.0)
    } else if theta >= 90.0 {
        (1.0, 0.0)
    } else {
        // complement rather than (90 - θ)/180 so the pair sums to 1 exactly
        let left = (90.0 + theta) / 180.0;
        (left, 1.0 - left)
    };
    Ok((left, right))
}

/// Overall amplitude term, linear in distance down to the `c_min / c_max`
/// floor.
pub fn distance_gain(r: f64, cfg: &ModulationConfig) -> Result<f64, ModulationError> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(ModulationError::NegativeDistance(r));
    }
    if !cfg.distance_enabled {
        return Ok(1.0);
    }
    let floor = cfg.c_min / cfg.c_max;
    if r >= cfg.floor_distance() {
        Ok(floor)
    } else {
        // guard against rounding just below the floor near the breakpoint
        Ok((1.0 - cfg.alpha * r).max(floor))
    }
}

pub fn gains(target: PolarTarget, cfg: &ModulationConfig) -> Result<GainPair, ModulationError> {
    let (a_left, a_right) = direction_gains(target.theta)?;
    let a = distance_gain(target.r, cfg)?;
    Ok(GainPair {
        left: cfg.c_max * a_left * a,
        right: cfg.c_max * a_right * a,
    })
}

/// Avatar state in the world frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    /// Degrees counter-clockwise from +x, in (-180, 180].
    pub heading: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, heading: f64) -> Result<Self, ModulationError> {
        Ok(Self {
            x,
            y,
            heading: wrap_angle(heading)?,
        })
    }

    /// Unit vector of the facing direction.
    pub fn forward(&self) -> (f64, f64) {
        let h = self.heading.to_radians();
        (h.cos(), h.sin())
    }
}

/// Polar coordinates of a world point as seen from `pose`.
pub fn relative_target(pose: &Pose, target: (f64, f64)) -> PolarTarget {
    let dx = target.0 - pose.x;
    let dy = target.1 - pose.y;
    let r = dx.hypot(dy);
    if r == 0.0 {
        return PolarTarget { r: 0.0, theta: 0.0 };
    }
    let bearing = dy.atan2(dx).to_degrees();
    let theta = wrap_angle(bearing - pose.heading).unwrap_or(0.0);
    PolarTarget { r, theta }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_cfg() -> ModulationConfig {
        ModulationConfig::new(1.0, 0.2, 0.1, true).unwrap()
    }

    #[test]
    fn wrap_examples() {
        assert_eq!(wrap_angle(0.0).unwrap(), 0.0);
        assert_eq!(wrap_angle(270.0).unwrap(), -90.0);
        assert_eq!(wrap_angle(-180.0).unwrap(), 180.0);
        assert_eq!(wrap_angle(180.0).unwrap(), 180.0);
        assert_eq!(wrap_angle(-540.0).unwrap(), 180.0);
        assert_eq!(wrap_angle(-1e-20).unwrap(), 0.0);
        assert!(wrap_angle(f64::NAN).is_err());
        assert!(wrap_angle(f64::INFINITY).is_err());
    }

    #[test]
    fn direction_examples() {
        assert_eq!(direction_gains(0.0).unwrap(), (0.5, 0.5));
        assert_eq!(direction_gains(90.0).unwrap(), (1.0, 0.0));
        assert_eq!(direction_gains(-90.0).unwrap(), (0.0, 1.0));
        assert_eq!(direction_gains(45.0).unwrap(), (0.75, 0.25));
        assert_eq!(direction_gains(180.0).unwrap(), (1.0, 0.0));
        assert_eq!(direction_gains(-135.0).unwrap(), (0.0, 1.0));
        assert!(matches!(
            direction_gains(-180.0),
            Err(ModulationError::AzimuthOutOfRange(_))
        ));
        assert!(direction_gains(181.0).is_err());
    }

    #[test]
    fn distance_examples() {
        let cfg = reference_cfg();
        assert_eq!(distance_gain(0.0, &cfg).unwrap(), 1.0);
        assert!((distance_gain(4.0, &cfg).unwrap() - 0.6).abs() < 1e-15);
        assert_eq!(distance_gain(8.0, &cfg).unwrap(), 0.2);
        assert_eq!(distance_gain(50.0, &cfg).unwrap(), 0.2);
        assert!(distance_gain(-0.1, &cfg).is_err());
        assert_eq!(distance_gain(50.0, &cfg.direction_only()).unwrap(), 1.0);
    }

    #[test]
    fn gain_examples() {
        let cfg = reference_cfg();
        let g = gains(PolarTarget::new(0.0, -90.0).unwrap(), &cfg).unwrap();
        assert_eq!(g, GainPair::new(0.0, 1.0));
        let g = gains(PolarTarget::new(4.0, 0.0).unwrap(), &cfg).unwrap();
        assert!((g.left - 0.3).abs() < 1e-15 && (g.right - 0.3).abs() < 1e-15);
        // hand evaluation: 0.75 * (1 - 0.1*2) and 0.25 * (1 - 0.1*2)
        let g = gains(PolarTarget::new(2.0, 45.0).unwrap(), &cfg).unwrap();
        assert!((g.left - 0.6).abs() < 1e-15 && (g.right - 0.2).abs() < 1e-15);
    }

    #[test]
    fn config_validation() {
        assert!(ModulationConfig::new(1.0, 1.5, 0.1, true).is_err());
        assert!(ModulationConfig::new(1.0, -0.1, 0.1, true).is_err());
        assert!(ModulationConfig::new(1.0, 0.2, 0.0, true).is_err());
        assert!(ModulationConfig::new(0.0, 0.0, 0.1, true).is_err());
        let cfg = ModulationConfig::with_reach(1.0, 0.2, 10.0).unwrap();
        assert!((cfg.alpha - 0.08).abs() < 1e-15);
        assert_eq!(distance_gain(10.0, &cfg).unwrap(), 0.2);
    }

    #[test]
    fn relative_target_examples() {
        let pose = Pose::new(0.0, 0.0, 0.0).unwrap();
        let t = relative_target(&pose, (2.0, 0.0));
        assert_eq!((t.r(), t.theta()), (2.0, 0.0));
        let t = relative_target(&pose, (0.0, 2.0));
        assert_eq!(t.r(), 2.0);
        assert!((t.theta() - 90.0).abs() < 1e-12);
        let t = relative_target(&pose, (0.0, 0.0));
        assert_eq!((t.r(), t.theta()), (0.0, 0.0));

        let north = Pose::new(1.0, 1.0, 90.0).unwrap();
        let t = relative_target(&north, (1.0, 4.0));
        assert!((t.r() - 3.0).abs() < 1e-12);
        assert!(t.theta().abs() < 1e-12);
    }

    #[test]
    fn relative_target_matches_rotation_oracle() {
        // Oracle: rotate the offset into the body frame (forward = +x',
        // left = +y') and read the angle there.
        for k in 0..72 {
            let heading = -175.0 + 5.0 * k as f64;
            let pose = Pose::new(0.3, -1.2, heading).unwrap();
            for &(tx, ty) in &[(3.0, 1.0), (-2.0, 5.0), (0.0, -4.0), (-3.0, -3.0)] {
                let (dx, dy) = (tx - pose.x, ty - pose.y);
                let h = heading.to_radians();
                let fwd = dx * h.cos() + dy * h.sin();
                let left = -dx * h.sin() + dy * h.cos();
                let expect = left.atan2(fwd).to_degrees();
                let got = relative_target(&pose, (tx, ty)).theta();
                let diff = wrap_angle(got - expect).unwrap();
                assert!(diff.abs() < 1e-9, "heading {heading}: {got} vs {expect}");
            }
        }
    }
}
