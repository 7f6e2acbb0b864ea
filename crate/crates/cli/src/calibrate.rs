use crate::{load_config, CliResult, Failure};
use std::path::PathBuf;
use vibronav::session_io::calibrate_jnd;
use vibronav::Mode;

#[derive(clap::Args)]
pub struct Args {
    /// Base config; its seed, trial count and confusion probability are used.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Mean absolute direction-finding error to match, degrees.
    #[arg(long, default_value_t = 20.0)]
    target: f64,
    /// Comma-separated amp_jnd values for the coarse sweep.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0.2,0.4,0.6,0.8,1.0,1.2,1.4,1.6"
    )]
    grid: Vec<f64>,
    /// Trials per sweep point.
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the base config with the fitted amp_jnd here.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

pub fn run(a: Args) -> CliResult {
    if a.grid.iter().any(|j| !(j.is_finite() && *j >= 0.0)) {
        return Err(Failure::Usage("grid values must be finite and >= 0".into()));
    }
    if !(a.target.is_finite() && a.target > 0.0) {
        return Err(Failure::Usage("--target must be > 0".into()));
    }
    let (mut cfg, world) = load_config(a.config.as_deref(), Mode::FrontDetect)?;
    cfg.trial_count = Some(a.trials);
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    let res = calibrate_jnd(&cfg, &world, &a.grid, a.target)?;
    println!(
        "{:>8}{:>16}{:>12}",
        "amp_jnd", "mean |err| deg", "within 30"
    );
    for p in &res.sweep {
        let mark = if p == &res.best { "  <" } else { "" };
        println!(
            "{:>8.3}{:>16.2}{:>11.1}%{mark}",
            p.amp_jnd,
            p.mean_abs,
            100.0 * p.pct_within_30
        );
    }
    println!("\n{}", res.config_fragment(&cfg));
    if let Some(path) = &a.out {
        let mut fitted = match &a.config {
            Some(p) => vibronav::session_io::RunConfig::load(p)?,
            None => vibronav::session_io::RunConfig::new(Mode::Navigation),
        };
        fitted.agent.amp_jnd = res.best.amp_jnd;
        std::fs::write(path, fitted.to_toml())
            .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
