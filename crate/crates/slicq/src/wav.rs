//! WAV input and output through `hound`.

use std::path::Path;

use hound::{SampleFormat, WavSpec};

use crate::error::{CliError, Result};

/// Deinterleaved audio with samples scaled to `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Audio {
    pub sample_rate: u32,
    pub channels: Vec<Vec<f64>>,
}

impl Audio {
    pub fn len(&self) -> usize {
        self.channels.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Pcm16,
    Pcm24,
    Float32,
}

pub fn read_wav(path: &Path) -> Result<Audio> {
    let reader = hound::WavReader::open(path).map_err(|e| match e {
        hound::Error::IoError(io) if io.kind() != std::io::ErrorKind::UnexpectedEof => {
            CliError::io(path, io)
        }
        other => CliError::Usage(format!(
            "{}: not a readable WAV file ({other})",
            path.display()
        )),
    })?;
    let spec = reader.spec();
    let count = spec.channels as usize;
    if count == 0 || count > 2 {
        return Err(CliError::Usage(format!(
            "{}: only mono and stereo files are supported",
            path.display()
        )));
    }
    let samples: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Float, 32) => reader
            .into_samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<Result<_, _>>()?,
        (SampleFormat::Int, bits @ (16 | 24)) => {
            let scale = 1.0 / (1u32 << (bits - 1)) as f64;
            reader
                .into_samples::<i32>()
                .map(|s| s.map(|v| v as f64 * scale))
                .collect::<Result<_, _>>()?
        }
        (format, bits) => {
            return Err(CliError::Usage(format!(
                "{}: unsupported sample format {format:?} with {bits} bits",
                path.display()
            )))
        }
    };
    if samples.is_empty() {
        return Err(CliError::Usage(format!(
            "{}: file contains no samples",
            path.display()
        )));
    }
    let channels = (0..count)
        .map(|c| samples.iter().skip(c).step_by(count).copied().collect())
        .collect();
    Ok(Audio {
        sample_rate: spec.sample_rate,
        channels,
    })
}

pub fn write_wav(path: &Path, audio: &Audio, format: OutputFormat) -> Result<()> {
    let (bits, sample_format) = match format {
        OutputFormat::Pcm16 => (16, SampleFormat::Int),
        OutputFormat::Pcm24 => (24, SampleFormat::Int),
        OutputFormat::Float32 => (32, SampleFormat::Float),
    };
    let spec = WavSpec {
        channels: audio.channels.len() as u16,
        sample_rate: audio.sample_rate,
        bits_per_sample: bits,
        sample_format,
    };
    let mut writer = hound::WavWriter::create(path, spec)?;
    let full = (1i64 << (bits - 1)) as f64;
    for i in 0..audio.len() {
        for channel in &audio.channels {
            let x = channel[i];
            match format {
                OutputFormat::Float32 => writer.write_sample(x as f32)?,
                _ => writer.write_sample((x * full).round().clamp(-full, full - 1.0) as i32)?,
            }
        }
    }
    writer.finalize()?;
    Ok(())
}
