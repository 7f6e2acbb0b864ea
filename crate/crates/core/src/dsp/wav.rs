//! RIFF/WAVE PCM input and output (16/24-bit integer, 32-bit float).

use super::{DspError, StereoBuffer};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WavEncoding {
    Int16,
    Int24,
    #[default]
    Float32,
}

impl From<hound::Error> for DspError {
    fn from(e: hound::Error) -> Self {
        match e {
            hound::Error::IoError(io) => DspError::Io(io),
            other => DspError::Format(other.to_string()),
        }
    }
}

/// Reads every channel of a WAV file as planar f32 in [-1, 1].
pub fn read_channels(path: impl AsRef<Path>) -> Result<(u32, Vec<Vec<f32>>), DspError> {
    let mut reader = hound::WavReader::open(path)?;
    let spec = reader.spec();
    let channels = spec.channels as usize;
    let interleaved: Vec<f32> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Float, 32) => reader.samples::<f32>().collect::<Result<_, _>>()?,
        (hound::SampleFormat::Int, bits @ (16 | 24)) => {
            let scale = 1.0 / (1i64 << (bits - 1)) as f32;
            reader
                .samples::<i32>()
                .map(|s| s.map(|v| v as f32 * scale))
                .collect::<Result<_, _>>()?
        }
        (fmt, bits) => {
            return Err(DspError::Format(format!("{bits}-bit {fmt:?} samples")));
        }
    };
    let mut planar = vec![Vec::with_capacity(interleaved.len() / channels.max(1)); channels];
    for frame in interleaved.chunks_exact(channels) {
        for (ch, &s) in frame.iter().enumerate() {
            planar[ch].push(s);
        }
    }
    Ok((spec.sample_rate, planar))
}

/// Reads a file as stereo. Mono files are duplicated; `map` picks the
/// left/right source channels of multi-channel files.
pub fn read_stereo(
    path: impl AsRef<Path>,
    map: Option<(usize, usize)>,
) -> Result<StereoBuffer, DspError> {
    let (rate, chans) = read_channels(path)?;
    let (l, r) = match (chans.len(), map) {
        (0, _) => return Err(DspError::Format("no channels".into())),
        (_, Some((l, r))) => {
            if l >= chans.len() || r >= chans.len() {
                return Err(DspError::Format(format!(
                    "channel map ({l}, {r}) out of range for {} channels",
                    chans.len()
                )));
            }
            (l, r)
        }
        (1, None) => (0, 0),
        (2, None) => (0, 1),
        (n, None) => {
            return Err(DspError::Format(format!(
                "{n} channels need an explicit channel map"
            )))
        }
    };
    StereoBuffer::from_channels(rate, &chans[l], &chans[r])
}

pub fn write_stereo(
    path: impl AsRef<Path>,
    buf: &StereoBuffer,
    encoding: WavEncoding,
) -> Result<(), DspError> {
    let (bits, format) = match encoding {
        WavEncoding::Int16 => (16, hound::SampleFormat::Int),
        WavEncoding::Int24 => (24, hound::SampleFormat::Int),
        WavEncoding::Float32 => (32, hound::SampleFormat::Float),
    };
    let spec = hound::WavSpec {
        channels: 2,
        sample_rate: buf.sample_rate,
        bits_per_sample: bits,
        sample_format: format,
    };
    let mut w = hound::WavWriter::create(path, spec)?;
    match encoding {
        WavEncoding::Float32 => {
            for &s in &buf.samples {
                w.write_sample(s)?;
            }
        }
        WavEncoding::Int16 | WavEncoding::Int24 => {
            let full = ((1i64 << (bits - 1)) - 1) as f32;
            for &s in &buf.samples {
                w.write_sample((s.clamp(-1.0, 1.0) * full).round() as i32)?;
            }
        }
    }
    w.finalize()?;
    Ok(())
}
