use super::{run_session, IoError};
use crate::agents::AgentParams;
use crate::dsp::{BlockRenderer, MultiTrack, StimulusParams, DEFAULT_BLOCK_SIZE};
use crate::modulation::ModulationConfig;
use crate::world::{Condition, Mode, SessionConfig, WorldSpec};
use std::sync::Arc;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealtimeReport {
    pub sessions: usize,
    pub simulated_s: f64,
    pub wall_s: f64,
}

impl RealtimeReport {
    /// Simulated seconds per wall-clock second of each session.
    pub fn factor(&self) -> f64 {
        self.simulated_s / self.wall_s
    }
}

/// Runs `sessions` navigation sessions in parallel, each for `seconds` of
/// simulated time with block rendering of a 48 kHz stimulus.
pub fn measure_realtime(sessions: usize, seconds: f64) -> Result<RealtimeReport, IoError> {
    let stimulus: Arc<MultiTrack> = Arc::new(
        StimulusParams {
            seconds: 4.0,
            ..Default::default()
        }
        .generate()?,
    );
    let world = Arc::new(WorldSpec::default_world());
    let modulation = ModulationConfig::with_reach(1.0, 0.2, super::world_reach(&world))?;
    let start = Instant::now();
    let results: Vec<Result<(), IoError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..sessions)
            .map(|k| {
                let world = world.clone();
                let renderer = BlockRenderer::new(stimulus.clone(), DEFAULT_BLOCK_SIZE);
                let condition = Condition::ALL[k % Condition::ALL.len()];
                scope.spawn(move || {
                    let mut cfg = SessionConfig::new(Mode::Navigation, condition, modulation);
                    cfg.rng_seed = k as u64;
                    // never finishes inside the window
                    cfg.trial_count = usize::MAX / 2;
                    run_session(
                        world,
                        cfg,
                        AgentParams::default(),
                        k as u64,
                        seconds,
                        Some(renderer),
                    )
                    .map(|_| ())
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("session thread panicked"))
            .collect()
    });
    let wall_s = start.elapsed().as_secs_f64();
    results.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(RealtimeReport {
        sessions,
        simulated_s: seconds,
        wall_s,
    })
}
