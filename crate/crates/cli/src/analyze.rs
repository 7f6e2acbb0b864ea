use crate::{CliResult, Failure};
use anyhow::Context;
use std::path::PathBuf;
use vibronav::evaluation::{
    analyze_likert, classify_log, front_detect_errors, likert_text, parse_likert,
    FrontDetectReport, NavigationReport,
};
use vibronav::session_io::{read_log_file, RunManifest};
use vibronav::{Mode, SessionLog, WorldSpec};

#[derive(clap::Args)]
pub struct Args {
    /// Session logs (JSON lines).
    logs: Vec<PathBuf>,
    /// World the logs were recorded in, as a world file.
    #[arg(long, conflicts_with = "manifest")]
    world: Option<PathBuf>,
    /// Take the world from a run manifest.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Questionnaire scores (CSV: participant,condition,question,score).
    #[arg(long)]
    likert: Option<PathBuf>,
    /// Also write the machine-readable report here.
    #[arg(long)]
    json: Option<PathBuf>,
}

fn world(a: &Args) -> anyhow::Result<WorldSpec> {
    if let Some(p) = &a.manifest {
        return Ok(RunManifest::load(p)?.world()?);
    }
    if let Some(p) = &a.world {
        let text = std::fs::read_to_string(p).with_context(|| p.display().to_string())?;
        return Ok(WorldSpec::parse(&text)?);
    }
    Ok(WorldSpec::default_world())
}

pub fn run(a: Args) -> CliResult {
    if a.logs.is_empty() && a.likert.is_none() {
        return Err(Failure::Usage(
            "no input: give session logs and/or --likert".into(),
        ));
    }
    let mut json = serde_json::Map::new();
    if !a.logs.is_empty() {
        let logs: Vec<SessionLog> = a
            .logs
            .iter()
            .map(|p| read_log_file(p))
            .collect::<Result<_, _>>()?;
        let modes: Vec<Mode> = logs.iter().map(|l| l.header.mode).collect();
        if modes.iter().any(|&m| m != modes[0]) {
            return Err(Failure::Usage(
                "logs mix navigation and front_detect sessions".into(),
            ));
        }
        match modes[0] {
            Mode::Navigation => {
                let w = world(&a)?;
                let mut all = Vec::new();
                let mut skipped = 0;
                for (log, path) in logs.iter().zip(&a.logs) {
                    if log.header.world_hash != w.hash() {
                        return Err(Failure::Domain(anyhow::anyhow!(
                            "{}: recorded in a different world (hash {}); pass --world or --manifest",
                            path.display(),
                            log.header.world_hash
                        )));
                    }
                    let (o, s) =
                        classify_log(log, &w).with_context(|| path.display().to_string())?;
                    all.extend(o);
                    skipped += s;
                }
                let report = NavigationReport::from_outcomes(&all, skipped)?;
                print!("{}", report.to_text());
                json.insert("navigation".into(), serde_json::to_value(&report)?);
                json.insert("trials".into(), serde_json::to_value(&all)?);
            }
            Mode::FrontDetect => {
                let mut errs = Vec::new();
                for (log, path) in logs.iter().zip(&a.logs) {
                    errs.extend(
                        front_detect_errors(log).with_context(|| path.display().to_string())?,
                    );
                }
                if errs.is_empty() {
                    Err(anyhow::anyhow!("the logs contain no committed answers"))?;
                }
                let report = FrontDetectReport::from_errors(&errs)?;
                print!("{}", report.to_text());
                json.insert("front_detect".into(), serde_json::to_value(&report)?);
            }
        }
    }
    if let Some(p) = &a.likert {
        let f = std::fs::File::open(p).with_context(|| p.display().to_string())?;
        let rows = parse_likert(f)?;
        let cmp = analyze_likert(&rows)?;
        if cmp.is_empty() {
            Err(anyhow::anyhow!(
                "{}: no condition pairs to compare",
                p.display()
            ))?;
        }
        if !a.logs.is_empty() {
            println!();
        }
        print!("{}", likert_text(&cmp));
        json.insert("likert".into(), serde_json::to_value(&cmp)?);
    }
    if let Some(p) = &a.json {
        let text = serde_json::to_string_pretty(&serde_json::Value::Object(json))?;
        std::fs::write(p, text + "\n").with_context(|| p.display().to_string())?;
    }
    Ok(())
}
