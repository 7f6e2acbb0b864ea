use super::spec::{Point, WorldSpec};
use crate::modulation::Pose;

/// Forward distance per detected step.
pub const STEP_LENGTH_M: f64 = 1.17;
/// Time over which one step's distance is covered.
pub const STEP_DURATION_S: f64 = 0.7;

/// Queued forward motion. Each step adds [`STEP_LENGTH_M`]; the queue drains
/// at `STEP_LENGTH_M / STEP_DURATION_S` along the current heading.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Locomotion {
    remaining: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Advance {
    pub distance: f64,
    /// The motion hit a wall and the rest of the queue was dropped.
    pub clamped: bool,
}

impl Locomotion {
    pub const SPEED: f64 = STEP_LENGTH_M / STEP_DURATION_S;

    pub fn queue_step(&mut self) {
        self.remaining += STEP_LENGTH_M;
    }

    pub fn remaining(&self) -> f64 {
        self.remaining
    }

    pub fn is_idle(&self) -> bool {
        self.remaining <= 0.0
    }

    pub fn clear(&mut self) {
        self.remaining = 0.0;
    }

    /// Moves `pose` forward for `dt` seconds, stopping at walls.
    pub fn advance(&mut self, pose: &mut Pose, world: &WorldSpec, dt: f64) -> Advance {
        if self.remaining <= 0.0 {
            return Advance {
                distance: 0.0,
                clamped: false,
            };
        }
        let want = self.remaining.min(Self::SPEED * dt);
        let u = pose.forward();
        let free = world.clamp_motion(Point::new(pose.x, pose.y), u, want);
        let clamped = free < want;
        pose.x += u.0 * free;
        pose.y += u.1 * free;
        if clamped {
            self.remaining = 0.0;
        } else {
            self.remaining -= want;
            // absorb rounding left over from the last partial tick
            if self.remaining < 1e-12 {
                self.remaining = 0.0;
            }
        }
        Advance {
            distance: free,
            clamped,
        }
    }
}
