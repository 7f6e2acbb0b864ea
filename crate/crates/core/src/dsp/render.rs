//! Block-based rendering of the audio and haptic outputs of a session.

use super::{
    apply_gains, arrival_cue, spatialize_vox, CueSignal, MultiTrack, StereoFrame, TrackGroup,
};
use crate::modulation::GainPair;
use crate::world::Condition;
use std::sync::Arc;

pub const DEFAULT_BLOCK_SIZE: usize = 512;

/// Running output energy, kept so callers can check what was rendered.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RenderStats {
    pub frames: u64,
    pub audio_energy: [f64; 2],
    pub haptic_energy: [f64; 2],
}

#[derive(Debug, Clone)]
struct ActiveCue {
    signal: Arc<CueSignal>,
    pos: usize,
}

/// Renders a looping stimulus per condition. Gains are held for a whole tick.
#[derive(Debug, Clone)]
pub struct BlockRenderer {
    stimulus: Arc<MultiTrack>,
    block_size: usize,
    cursor: usize,
    cues: Vec<ActiveCue>,
    haptic_cue: Arc<CueSignal>,
    ping_cue: Arc<CueSignal>,
    audio: Vec<f32>,
    haptic: Vec<f32>,
    stats: RenderStats,
}

impl BlockRenderer {
    pub fn new(stimulus: Arc<MultiTrack>, block_size: usize) -> Self {
        let fs = stimulus.sample_rate();
        let block_size = block_size.max(1);
        Self {
            haptic_cue: Arc::new(CueSignal::render(arrival_cue(Condition::HapDir), fs)),
            ping_cue: Arc::new(CueSignal::render(arrival_cue(Condition::Nt), fs)),
            stimulus,
            block_size,
            cursor: 0,
            cues: Vec::new(),
            audio: vec![0.0; 2 * block_size],
            haptic: vec![0.0; 2 * block_size],
            stats: RenderStats::default(),
        }
    }

    pub fn sample_rate(&self) -> u32 {
        self.stimulus.sample_rate()
    }

    pub fn stats(&self) -> RenderStats {
        self.stats
    }

    pub fn trigger_cue(&mut self, condition: Condition) {
        let signal = if arrival_cue(condition).is_haptic() {
            self.haptic_cue.clone()
        } else {
            self.ping_cue.clone()
        };
        self.cues.push(ActiveCue { signal, pos: 0 });
    }

    /// Renders `frames` frames. `sink` receives each interleaved
    /// (audio, haptic) block.
    pub fn render<F>(
        &mut self,
        frames: usize,
        condition: Condition,
        haptic_gains: GainPair,
        theta: f64,
        mut sink: F,
    ) where
        F: FnMut(&[f32], &[f32]),
    {
        let total = self.stimulus.frames();
        if total == 0 {
            return;
        }
        let mix = self.stimulus.group(TrackGroup::Mix).samples.as_slice();
        let vox = self.stimulus.group(TrackGroup::Vox).samples.as_slice();
        let inst = self.stimulus.group(TrackGroup::Inst).samples.as_slice();
        let spatial_vox = condition.spatial_vox();
        let mut left = frames;
        while left > 0 {
            let n = left.min(self.block_size);
            for i in 0..n {
                let k = 2 * self.cursor;
                let m = StereoFrame::new(mix[k] as f64, mix[k + 1] as f64);
                let a = if spatial_vox {
                    let p = spatialize_vox(0.5 * (vox[k] + vox[k + 1]) as f64, theta);
                    StereoFrame::new(inst[k] as f64 + p.left, inst[k + 1] as f64 + p.right)
                } else {
                    m
                };
                let h = apply_gains(m, haptic_gains);
                self.audio[2 * i] = a.left as f32;
                self.audio[2 * i + 1] = a.right as f32;
                self.haptic[2 * i] = h.left as f32;
                self.haptic[2 * i + 1] = h.right as f32;
                self.cursor += 1;
                if self.cursor == total {
                    self.cursor = 0;
                }
            }
            for cue in &mut self.cues {
                let out = if cue.signal.kind.is_haptic() {
                    &mut self.haptic
                } else {
                    &mut self.audio
                };
                let avail = (cue.signal.samples.len() - cue.pos).min(n);
                for i in 0..avail {
                    let s = cue.signal.samples[cue.pos + i];
                    out[2 * i] += s;
                    out[2 * i + 1] += s;
                }
                cue.pos += avail;
            }
            self.cues.retain(|c| c.pos < c.signal.samples.len());
            let (a, h) = (&self.audio[..2 * n], &self.haptic[..2 * n]);
            for fr in a.chunks_exact(2) {
                self.stats.audio_energy[0] += (fr[0] * fr[0]) as f64;
                self.stats.audio_energy[1] += (fr[1] * fr[1]) as f64;
            }
            for fr in h.chunks_exact(2) {
                self.stats.haptic_energy[0] += (fr[0] * fr[0]) as f64;
                self.stats.haptic_energy[1] += (fr[1] * fr[1]) as f64;
            }
            self.stats.frames += n as u64;
            sink(a, h);
            left -= n;
        }
    }
}
