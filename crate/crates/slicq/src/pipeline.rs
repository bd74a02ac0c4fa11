//! Whole-file operations shared by the command-line tool and its tests.

use slicq_core::fft::RustFftPlan;
use slicq_core::processing::{
    transpose_coefficients, transpose_sliced, Mask, Maskable, Transposition,
};
use slicq_core::{
    build_cq_system, make_slicing_window, CqDesign, CqParams, NsgTransform, RustFftPlanner, Slicq,
};

use crate::container::{Coefficients, Container, Header};
use crate::error::{CliError, Result};
use crate::wav::Audio;

/// Filterbank parameters plus optional slicing `(N, M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub params: CqParams,
    pub slicing: Option<(usize, usize)>,
}

impl Settings {
    /// `slice_len` is the frame length `2N`; the transition defaults to `N / 8`.
    pub fn new(
        params: CqParams,
        slice_len: Option<usize>,
        transition: Option<usize>,
    ) -> Result<Self> {
        let slicing = match (slice_len, transition) {
            (None, None) => None,
            (None, Some(_)) => return Err(CliError::Usage("--transition needs --slice".into())),
            (Some(len), m) => {
                if len < 4 || len % 4 != 0 {
                    return Err(CliError::Usage(format!(
                        "slice length {len} must be a positive multiple of 4"
                    )));
                }
                let n = len / 2;
                let m = m.unwrap_or((n / 8).max(2) & !1);
                make_slicing_window(n, m).map_err(|e| CliError::Usage(e.to_string()))?;
                Some((n, m))
            }
        };
        Ok(Self { params, slicing })
    }

    /// Uses the file's sample rate for `xi_s`.
    pub fn for_rate(&self, sample_rate: u32) -> Result<Self> {
        let params = CqParams {
            sample_rate: sample_rate as f64,
            ..self.params
        };
        params
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(Self {
            params,
            ..self.clone()
        })
    }

    /// Signal length after zero-padding `len` samples.
    pub fn padded_len(&self, len: usize) -> usize {
        match self.slicing {
            Some((n, _)) => len.div_ceil(2 * n).max(1) * 2 * n,
            None => len,
        }
    }
}

/// A planned transform for one signal length.
#[derive(Clone)]
pub enum Engine {
    Full(NsgTransform<RustFftPlan>),
    Sliced(Slicq<RustFftPlan>),
}

impl Engine {
    pub fn new(settings: &Settings, len: usize) -> Result<Self> {
        let mut planner = RustFftPlanner::new();
        Ok(match settings.slicing {
            None => Engine::Full(NsgTransform::new(
                build_cq_system(&settings.params, len)?,
                &mut planner,
            )?),
            Some((n, m)) => {
                let system = CqDesign::new(&settings.params, 2 * n)?.system()?;
                Engine::Sliced(Slicq::new(
                    make_slicing_window(n, m)?,
                    system,
                    &mut planner,
                )?)
            }
        })
    }

    pub fn bands(&self) -> usize {
        let channels = match self {
            Engine::Full(t) => t.system().channel_count(),
            Engine::Sliced(s) => s.coef_counts().len(),
        };
        (channels - 2) / 2
    }

    pub fn analyze(&self, signal: &[f64]) -> Result<Coefficients> {
        Ok(match self {
            Engine::Full(t) => Coefficients::Full(t.real_analyze(signal)?),
            Engine::Sliced(s) => Coefficients::Sliced(s.real_analyze(signal)?),
        })
    }

    pub fn synthesize(&self, c: &Coefficients) -> Result<Vec<f64>> {
        Ok(match (self, c) {
            (Engine::Full(t), Coefficients::Full(c)) => t.real_synthesize(c)?,
            (Engine::Sliced(s), Coefficients::Sliced(c)) => s.real_synthesize(c)?,
            _ => {
                return Err(CliError::Format(
                    "coefficient layout does not match the transform".into(),
                ))
            }
        })
    }

    pub fn transpose(&self, c: &Coefficients, t: &Transposition) -> Result<Coefficients> {
        let mut planner = RustFftPlanner::new();
        Ok(match (self, c) {
            (Engine::Full(nsgt), Coefficients::Full(c)) => {
                Coefficients::Full(transpose_coefficients(nsgt.system(), c, t, &mut planner)?)
            }
            (Engine::Sliced(s), Coefficients::Sliced(c)) => Coefficients::Sliced(transpose_sliced(
                s.transform().system(),
                c,
                t,
                &mut planner,
            )?),
            _ => {
                return Err(CliError::Format(
                    "coefficient layout does not match the transform".into(),
                ))
            }
        })
    }
}

fn padded(signal: &[f64], len: usize) -> Vec<f64> {
    let mut out = signal.to_vec();
    out.resize(len, 0.0);
    out
}

pub fn analyze_audio(audio: &Audio, settings: &Settings) -> Result<Container> {
    if audio.is_empty() {
        return Err(CliError::Usage("input has no samples".into()));
    }
    let settings = settings.for_rate(audio.sample_rate)?;
    let len = settings.padded_len(audio.len());
    let engine = Engine::new(&settings, len)?;
    let channels = audio
        .channels
        .iter()
        .map(|ch| engine.analyze(&padded(ch, len)))
        .collect::<Result<Vec<_>>>()?;
    let coef_counts = match &engine {
        Engine::Full(t) => t.coef_counts(),
        Engine::Sliced(s) => s.coef_counts(),
    };
    let header = Header {
        signal_len: len as u64,
        slicing: settings.slicing.map(|(n, m)| (n as u64, m as u64)),
        original_len: audio.len() as u64,
        audio_channels: audio.channels.len() as u32,
        params: settings.params,
        coef_counts: coef_counts.iter().map(|&m| m as u64).collect(),
    };
    Ok(Container { header, channels })
}

pub fn settings_of(header: &Header) -> Settings {
    Settings {
        params: header.params,
        slicing: header.slicing.map(|(n, m)| (n as usize, m as usize)),
    }
}

pub fn synthesize_container(container: &Container) -> Result<Audio> {
    let h = &container.header;
    let engine = Engine::new(&settings_of(h), h.signal_len as usize)?;
    let channels = container
        .channels
        .iter()
        .map(|c| {
            let mut out = engine.synthesize(c)?;
            out.truncate(h.original_len as usize);
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Audio {
        sample_rate: h.params.sample_rate.round() as u32,
        channels,
    })
}

/// Applies `op` to the coefficients of each audio channel and resynthesizes.
pub fn process_audio(
    audio: &Audio,
    settings: &Settings,
    mut op: impl FnMut(&Engine, Coefficients) -> Result<Coefficients>,
) -> Result<Audio> {
    let mut container = analyze_audio(audio, settings)?;
    let engine = Engine::new(
        &settings_of(&container.header),
        container.header.signal_len as usize,
    )?;
    container.channels = container
        .channels
        .into_iter()
        .map(|c| op(&engine, c))
        .collect::<Result<Vec<_>>>()?;
    synthesize_container(&container)
}

pub fn mask_audio(audio: &Audio, settings: &Settings, mask: &Mask) -> Result<Audio> {
    process_audio(audio, settings, |_, mut c| {
        match &mut c {
            Coefficients::Full(c) => c.apply_mask(mask)?,
            Coefficients::Sliced(s) => s.apply_mask(mask)?,
        }
        Ok(c)
    })
}

/// Shifts by `shift` channels; `range` defaults to every channel that stays
/// inside the geometric bands.
pub fn transpose_audio(
    audio: &Audio,
    settings: &Settings,
    shift: i64,
    range: Option<(usize, usize)>,
) -> Result<Audio> {
    process_audio(audio, settings, |engine, c| {
        let t = match range {
            Some((low, high)) => Transposition {
                shift,
                low,
                high,
                real: true,
            },
            None => Transposition::whole(shift, engine.bands(), true)?,
        };
        engine.transpose(&c, &t)
    })
}

/// `|c|^2` per frequency channel (`|s^0 + s^1|^2` when sliced).
pub fn power(c: &Coefficients) -> Vec<Vec<f64>> {
    match c {
        Coefficients::Full(c) => c
            .channels()
            .iter()
            .map(|ch| ch.iter().map(|v| v.norm_sqr()).collect())
            .collect(),
        Coefficients::Sliced(s) => s.spectrogram(),
    }
}
