//! Stereo-balance vibration navigation: gain modulation, signal processing,
//! a simulated grid world with scripted participants, and the analysis
//! pipeline.

// `!(x > 0.0)` is the NaN-rejecting form used throughout
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agents;
pub mod dsp;
pub mod evaluation;
pub mod modulation;
pub mod session_io;
pub mod world;

pub use modulation::{gains, relative_target, GainPair, ModulationConfig, PolarTarget, Pose};
pub use world::{Condition, Mode, Session, SessionConfig, SessionLog, WorldSpec};
