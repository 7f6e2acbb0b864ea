use crate::{CliResult, Failure};
use anyhow::Context;
use std::path::PathBuf;
use vibronav::dsp::wav::{read_stereo, write_stereo, WavEncoding};
use vibronav::dsp::{
    integrated_loudness, normalize_loudness, thd, Loudness, StereoBuffer, StimulusParams,
    TrackGroup, DEFAULT_HARMONICS, DEFAULT_TARGET_LUFS,
};

#[derive(clap::Args)]
pub struct Args {
    /// WAV files to measure.
    tracks: Vec<PathBuf>,
    /// Synthesize the vox/instrument stimulus instead of reading tracks.
    #[arg(long)]
    generate: bool,
    /// Seed of the synthetic stimulus.
    #[arg(long, default_value_t = 7, requires = "generate")]
    seed: u64,
    /// Length of the synthetic stimulus, s.
    #[arg(long, default_value_t = 8.0, requires = "generate")]
    seconds: f64,
    /// Normalize each track and write it to --out.
    #[arg(long)]
    normalize: bool,
    #[arg(long, default_value_t = DEFAULT_TARGET_LUFS, allow_hyphen_values = true)]
    target: f64,
    /// Report THD of each channel.
    #[arg(long)]
    thd: bool,
    #[arg(long, default_value_t = DEFAULT_HARMONICS)]
    harmonics: usize,
    #[arg(long, short, default_value = "audio-out")]
    out: PathBuf,
}

fn channel(buf: &StereoBuffer, ch: usize) -> Vec<f64> {
    buf.channel(ch).map(f64::from).collect()
}

fn short(l: Loudness) -> String {
    l.lufs().map_or("below gate".into(), |v| format!("{v:.2}"))
}

pub fn run(a: Args) -> CliResult {
    if a.tracks.is_empty() && !a.generate {
        return Err(Failure::Usage("give WAV tracks or --generate".into()));
    }
    if !a.tracks.is_empty() && a.generate {
        return Err(Failure::Usage(
            "--generate does not take track arguments".into(),
        ));
    }
    let mut tracks: Vec<(String, StereoBuffer)> = Vec::new();
    if a.generate {
        let stim = StimulusParams {
            seed: a.seed,
            seconds: a.seconds,
            ..StimulusParams::default()
        }
        .generate()?;
        for g in TrackGroup::ALL {
            tracks.push((g.name().to_string(), stim.group(g).clone()));
        }
    } else {
        for p in &a.tracks {
            let buf = read_stereo(p, None).with_context(|| p.display().to_string())?;
            let name = p
                .file_stem()
                .map_or("track".into(), |s| s.to_string_lossy().into_owned());
            tracks.push((name, buf));
        }
    }
    if a.normalize || a.generate {
        std::fs::create_dir_all(&a.out).with_context(|| a.out.display().to_string())?;
    }
    println!(
        "{:<16}{:>12}{:>12}{:>12}",
        "track", "LUFS", "gain (dB)", "after"
    );
    for (name, buf) in &tracks {
        let before = integrated_loudness(buf)?;
        if a.normalize {
            let n = normalize_loudness(buf, a.target).with_context(|| name.clone())?;
            let after = integrated_loudness(&n.buffer)?;
            println!(
                "{name:<16}{:>12}{:>12.2}{:>12}",
                short(before),
                20.0 * n.gain.log10(),
                short(after)
            );
            let path = a.out.join(format!("{name}.wav"));
            write_stereo(&path, &n.buffer, WavEncoding::Float32)?;
        } else {
            println!("{name:<16}{:>12}{:>12}{:>12}", short(before), "-", "-");
            if a.generate {
                write_stereo(a.out.join(format!("{name}.wav")), buf, WavEncoding::Float32)?;
            }
        }
        if a.thd {
            for (ch, label) in [(0, "L"), (1, "R")] {
                let v = thd(&channel(buf, ch), buf.sample_rate as f64, a.harmonics)
                    .with_context(|| format!("{name} {label}"))?;
                println!("  THD {label}: {v:.3e} ({:.1} dB)", 20.0 * v.log10());
            }
        }
    }
    Ok(())
}
