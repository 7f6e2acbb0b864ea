use super::spec::{Point, WorldSpec};
use super::WorldError;
use crate::modulation::{wrap_angle, PolarTarget};
use rand::Rng;

/// Radius of the direction-finding target circle.
pub const CIRCLE_RADIUS_M: f64 = 2.0;

/// Uniform draw over the spawn points other than `exclude`.
pub fn spawn_target<R: Rng + ?Sized>(
    rng: &mut R,
    world: &WorldSpec,
    exclude: Option<usize>,
) -> Result<(usize, Point), WorldError> {
    let n = world.spawn_points().len();
    let candidates = n - usize::from(exclude.is_some_and(|e| e < n));
    if candidates == 0 {
        return Err(WorldError::Config(
            "no spawn point left to choose from".into(),
        ));
    }
    let mut k = rng.random_range(0..candidates);
    if let Some(e) = exclude {
        if k >= e {
            k += 1;
        }
    }
    Ok((k, world.spawn_points()[k]))
}

/// Target on a circle around the participant. `theta` of the result is the
/// world bearing, uniform over (-180, 180].
pub fn spawn_circle_target<R: Rng + ?Sized>(
    rng: &mut R,
    radius: f64,
) -> Result<PolarTarget, WorldError> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(WorldError::Config(format!("circle radius {radius}")));
    }
    // (-180, 180]: map [0, 360) onto it by flipping the sign
    let u: f64 = rng.random_range(0.0..360.0);
    let bearing = wrap_angle(180.0 - u)?;
    Ok(PolarTarget::new(radius, bearing)?)
}
