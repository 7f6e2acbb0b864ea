use super::{write_log_file, IoError, RunConfig, RunManifest, ARTIFACT_VERSION};
use crate::agents::{AgentParams, Seeker, Walker};
use crate::dsp::{BlockRenderer, MultiTrack, DEFAULT_BLOCK_SIZE};
use crate::world::{Condition, Controller, Mode, Session, SessionConfig, SessionLog, WorldSpec};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::{Path, PathBuf};
use std::sync::Arc;

/// Session and agent seeds for one condition. Each condition draws from its
/// own ChaCha stream, so running a subset of conditions reproduces the same
/// sessions.
pub fn session_seeds(base: u64, condition: Condition) -> (u64, u64) {
    let stream = Condition::ALL
        .iter()
        .position(|&c| c == condition)
        .unwrap_or(0) as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(stream + 1);
    (rng.next_u64(), rng.next_u64())
}

/// Runs one agent-driven session to completion or until `max_s` of
/// simulated time.
pub fn run_session(
    world: Arc<WorldSpec>,
    cfg: SessionConfig,
    agent: AgentParams,
    agent_seed: u64,
    max_s: f64,
    renderer: Option<BlockRenderer>,
) -> Result<SessionLog, IoError> {
    let mut controller: Box<dyn Controller> = match cfg.mode {
        Mode::FrontDetect => Box::new(Seeker::new(agent, agent_seed)),
        Mode::Navigation => Box::new(Walker::new(agent, agent_seed)),
    };
    let max_ticks = (max_s / cfg.tick).ceil() as u64;
    let mut session = Session::new(world, cfg, "agent")?;
    if let Some(r) = renderer {
        session.attach_renderer(r);
    }
    while !session.is_finished() && session.ticks() < max_ticks {
        session.tick(controller.as_mut())?;
    }
    Ok(session.into_log())
}

#[derive(Debug, Clone)]
pub struct BatchRun {
    pub condition: Condition,
    pub log: SessionLog,
}

/// Runs every configured condition, one thread per condition.
pub fn run_batch(cfg: &RunConfig, world: Arc<WorldSpec>) -> Result<Vec<BatchRun>, IoError> {
    cfg.validate()?;
    let stimulus = if cfg.render_audio {
        Some(Arc::new(cfg.stimulus.generate()?))
    } else {
        None
    };
    let jobs: Vec<(Condition, SessionConfig, u64)> = cfg
        .conditions
        .iter()
        .map(|&c| {
            let (s, a) = session_seeds(cfg.seed, c);
            Ok((c, cfg.session_config(&world, c, s)?, a))
        })
        .collect::<Result<_, IoError>>()?;
    let results: Vec<Result<BatchRun, IoError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .into_iter()
            .map(|(condition, scfg, agent_seed)| {
                let world = world.clone();
                let renderer = stimulus
                    .clone()
                    .map(|s: Arc<MultiTrack>| BlockRenderer::new(s, DEFAULT_BLOCK_SIZE));
                let agent = cfg.agent;
                let max_s = cfg.max_session_s;
                scope.spawn(move || {
                    run_session(world, scfg, agent, agent_seed, max_s, renderer)
                        .map(|log| BatchRun { condition, log })
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("session thread panicked"))
            .collect()
    });
    results.into_iter().collect()
}

#[derive(Debug, Clone)]
pub struct SimulationOutput {
    pub manifest: RunManifest,
    pub manifest_path: PathBuf,
    pub log_paths: Vec<PathBuf>,
    pub runs: Vec<BatchRun>,
}

fn log_name(mode: Mode, c: Condition) -> String {
    let m = match mode {
        Mode::FrontDetect => "front-detect",
        Mode::Navigation => "navigation",
    };
    format!("{m}-{}.jsonl", c.slug())
}

/// Runs the batch and writes one log per condition plus `manifest.json`
/// into `out_dir`.
pub fn simulate(
    cfg: &RunConfig,
    world: &WorldSpec,
    out_dir: &Path,
) -> Result<SimulationOutput, IoError> {
    std::fs::create_dir_all(out_dir).map_err(|e| IoError::file(out_dir, e))?;
    let runs = run_batch(cfg, Arc::new(world.clone()))?;
    let mut outputs = Vec::new();
    let mut log_paths = Vec::new();
    for r in &runs {
        let name = log_name(cfg.mode, r.condition);
        let path = out_dir.join(&name);
        write_log_file(&r.log, &path)?;
        outputs.push(name);
        log_paths.push(path);
    }
    let manifest = RunManifest {
        artifact_version: ARTIFACT_VERSION.into(),
        config: cfg.clone(),
        world_text: world.to_text(),
        world_hash: world.hash(),
        seed: cfg.seed,
        outputs,
    };
    let manifest_path = out_dir.join("manifest.json");
    manifest.save(&manifest_path)?;
    Ok(SimulationOutput {
        manifest,
        manifest_path,
        log_paths,
        runs,
    })
}
