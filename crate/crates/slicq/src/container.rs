//! The `NSGC1` coefficient file format.
//!
//! All integers and floats are little-endian.
//!
//! | offset | size | field |
//! |---|---|---|
//! | 0 | 5 | magic `NSGC1` |
//! | 5 | 1 | version (1) |
//! | 6 | 1 | layer count: 1 full-length, 2 sliced |
//! | 7 | 1 | window shape: 0 Hann, 1 Blackman-Harris |
//! | 8 | 8 | padded signal length `L` |
//! | 16 | 8 | hop `N` (0 for full-length) |
//! | 24 | 8 | transition `M` (0 for full-length) |
//! | 32 | 8 | original signal length |
//! | 40 | 4 | audio channels |
//! | 44 | 4 | bins per octave |
//! | 48 | 8 | minimal filter length |
//! | 56 | 8 | `xi_min` (f64) |
//! | 64 | 8 | `xi_max` (f64) |
//! | 72 | 8 | `xi_s` (f64) |
//! | 80 | 4 | channel count `C` |
//! | 84 | 8C | coefficient count `M_k` of each channel's transform |
//!
//! The payload follows: for each audio channel, each layer and each
//! frequency channel, the coefficients as interleaved f64 real/imaginary
//! pairs. A sliced layer holds `M_k * L / 2N` coefficients per channel.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use slicq_core::{CqParams, RaggedCoefficients, SlicedCoefficients, WindowShape};

use crate::error::{CliError, Result};

const MAGIC: &[u8; 5] = b"NSGC1";
const VERSION: u8 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Header {
    pub signal_len: u64,
    /// `(N, M)` for sliced coefficients.
    pub slicing: Option<(u64, u64)>,
    pub original_len: u64,
    pub audio_channels: u32,
    pub params: CqParams,
    pub coef_counts: Vec<u64>,
}

impl Header {
    pub fn layer_count(&self) -> usize {
        if self.slicing.is_some() {
            2
        } else {
            1
        }
    }

    /// Stored coefficients per frequency channel and layer.
    pub fn layer_lens(&self) -> Vec<usize> {
        let periods = match self.slicing {
            Some((n, _)) => (self.signal_len / (2 * n)) as usize,
            None => 1,
        };
        self.coef_counts
            .iter()
            .map(|&m| m as usize * periods)
            .collect()
    }
}

/// Coefficients of one audio channel.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficients {
    Full(RaggedCoefficients),
    Sliced(SlicedCoefficients),
}

impl Coefficients {
    fn layers(&self) -> Vec<&RaggedCoefficients> {
        match self {
            Coefficients::Full(c) => vec![c],
            Coefficients::Sliced(s) => s.layers().iter().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Container {
    pub header: Header,
    pub channels: Vec<Coefficients>,
}

fn shape_code(shape: WindowShape) -> u8 {
    match shape {
        WindowShape::Hann => 0,
        WindowShape::BlackmanHarris => 1,
    }
}

impl Container {
    pub fn write_to(&self, out: &mut impl Write) -> std::io::Result<()> {
        let h = &self.header;
        let p = &h.params;
        let (n, m) = h.slicing.unwrap_or((0, 0));
        let mut head = Vec::with_capacity(84 + 8 * h.coef_counts.len());
        head.extend_from_slice(MAGIC);
        head.push(VERSION);
        head.push(h.layer_count() as u8);
        head.push(shape_code(p.shape));
        for v in [h.signal_len, n, m, h.original_len] {
            head.extend_from_slice(&v.to_le_bytes());
        }
        head.extend_from_slice(&h.audio_channels.to_le_bytes());
        head.extend_from_slice(&p.bins_per_octave.to_le_bytes());
        head.extend_from_slice(&(p.min_filter_len as u64).to_le_bytes());
        for v in [p.min_freq, p.max_freq, p.sample_rate] {
            head.extend_from_slice(&v.to_le_bytes());
        }
        head.extend_from_slice(&(h.coef_counts.len() as u32).to_le_bytes());
        for c in &h.coef_counts {
            head.extend_from_slice(&c.to_le_bytes());
        }
        out.write_all(&head)?;

        let mut buf = Vec::new();
        for channel in &self.channels {
            for layer in channel.layers() {
                buf.clear();
                for v in layer.channels().iter().flatten() {
                    buf.extend_from_slice(&v.re.to_le_bytes());
                    buf.extend_from_slice(&v.im.to_le_bytes());
                }
                out.write_all(&buf)?;
            }
        }
        Ok(())
    }

    pub fn read_from(input: &mut impl Read) -> Result<Self> {
        let mut bytes = Vec::new();
        input
            .read_to_end(&mut bytes)
            .map_err(|e| CliError::Format(e.to_string()))?;
        let mut r = Reader {
            bytes: &bytes,
            pos: 0,
        };
        if r.take(5)? != MAGIC {
            return Err(CliError::Format("missing NSGC1 magic".into()));
        }
        let version = r.u8()?;
        if version != VERSION {
            return Err(CliError::Format(format!("unsupported version {version}")));
        }
        let layers = r.u8()?;
        let shape = match r.u8()? {
            0 => WindowShape::Hann,
            1 => WindowShape::BlackmanHarris,
            other => {
                return Err(CliError::Format(format!(
                    "unknown window shape code {other}"
                )))
            }
        };
        let signal_len = r.u64()?;
        let (n, m) = (r.u64()?, r.u64()?);
        let original_len = r.u64()?;
        let audio_channels = r.u32()?;
        let bins_per_octave = r.u32()?;
        let min_filter_len = r.u64()? as usize;
        let (min_freq, max_freq, sample_rate) = (r.f64()?, r.f64()?, r.f64()?);
        let count = r.u32()? as usize;
        let coef_counts = (0..count).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;

        let slicing = match (layers, n) {
            (1, 0) => None,
            (2, n) if n > 0 && signal_len % (2 * n) == 0 => Some((n, m)),
            _ => {
                return Err(CliError::Format(format!(
                    "inconsistent layer count {layers} for hop {n}"
                )))
            }
        };
        let params = CqParams {
            min_freq,
            max_freq,
            sample_rate,
            bins_per_octave,
            shape,
            min_filter_len,
        };
        let header = Header {
            signal_len,
            slicing,
            original_len,
            audio_channels,
            params,
            coef_counts,
        };

        let lens = header.layer_lens();
        let expected: usize =
            lens.iter().sum::<usize>() * header.layer_count() * audio_channels as usize * 16;
        if r.bytes.len() - r.pos != expected {
            return Err(CliError::Format(format!(
                "payload has {} bytes, header implies {expected}",
                r.bytes.len() - r.pos
            )));
        }
        let len = signal_len as usize;
        let read_layer = |r: &mut Reader| -> Result<RaggedCoefficients> {
            let channels = lens
                .iter()
                .map(|&l| {
                    (0..l)
                        .map(|_| Ok(Complex64::new(r.f64()?, r.f64()?)))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(RaggedCoefficients::new(channels, len))
        };
        let mut channels = Vec::with_capacity(audio_channels as usize);
        for _ in 0..audio_channels {
            let coefs = match header.slicing {
                None => Coefficients::Full(read_layer(&mut r)?),
                Some((n, m)) => {
                    let layers = [read_layer(&mut r)?, read_layer(&mut r)?];
                    let counts: Vec<usize> =
                        header.coef_counts.iter().map(|&c| c as usize).collect();
                    let s =
                        SlicedCoefficients::from_layers(layers, &counts, n as usize, m as usize)
                            .map_err(|e| CliError::Format(e.to_string()))?;
                    Coefficients::Sliced(s)
                }
            };
            channels.push(coefs);
        }
        Ok(Container { header, channels })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
        let mut out = std::io::BufWriter::new(file);
        self.write_to(&mut out)
            .and_then(|_| out.flush())
            .map_err(|e| CliError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
        Self::read_from(&mut std::io::BufReader::new(file))
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos + n;
        let out = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| CliError::Format("truncated header".into()))?;
        self.pos = end;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}
