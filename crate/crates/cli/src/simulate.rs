use crate::{load_config, CliResult, Failure};
use std::path::PathBuf;
use vibronav::evaluation::{
    classify_log, front_detect_errors, FrontDetectReport, NavigationReport,
};
use vibronav::session_io::{simulate, RunManifest};
use vibronav::Mode;

#[derive(clap::Args)]
pub struct Args {
    /// Run config (TOML). Defaults to the built-in navigation setup.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Re-run exactly what a previous manifest describes.
    #[arg(long, conflicts_with = "config")]
    manifest: Option<PathBuf>,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the trial count per condition.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, short, default_value = "runs/latest")]
    out: PathBuf,
}

pub fn run(a: Args) -> CliResult {
    let (mut cfg, world) = match &a.manifest {
        Some(p) => {
            let m = RunManifest::load(p)?;
            (m.config.clone(), m.world()?)
        }
        None => load_config(a.config.as_deref(), Mode::Navigation)?,
    };
    if a.manifest.is_some() && (a.seed.is_some() || a.trials.is_some()) {
        return Err(Failure::Usage(
            "--seed and --trials cannot override a manifest".into(),
        ));
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(t) = a.trials {
        cfg.trial_count = Some(t);
    }
    cfg.validate()?;
    let out = simulate(&cfg, &world, &a.out)?;
    for p in &out.log_paths {
        println!("wrote {}", p.display());
    }
    println!("wrote {}", out.manifest_path.display());
    match cfg.mode {
        Mode::Navigation => {
            let mut all = Vec::new();
            let mut skipped = 0;
            for r in &out.runs {
                let (o, s) = classify_log(&r.log, &world)?;
                all.extend(o);
                skipped += s;
            }
            print!(
                "\n{}",
                NavigationReport::from_outcomes(&all, skipped)?.to_text()
            );
        }
        Mode::FrontDetect => {
            let mut errs = Vec::new();
            for r in &out.runs {
                errs.extend(front_detect_errors(&r.log)?);
            }
            print!("\n{}", FrontDetectReport::from_errors(&errs)?.to_text());
        }
    }
    Ok(())
}
