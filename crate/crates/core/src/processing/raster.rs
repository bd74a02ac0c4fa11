//! Band-limited resampling of ragged channels to a common time grid.
//!
//! A channel of `M` coefficients is treated as one period of a band-limited
//! sequence: its DFT is zero-padded to `T` bins (an even-length Nyquist bin
//! is split evenly between the positive and negative side) and transformed
//! back, which keeps sample values and commutes with complex conjugation.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{Fft, FftPlanner};
use crate::transform::RaggedCoefficients;

/// Channels resampled to a common length `T`, stored channel by channel.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterCoefficients {
    data: Vec<Complex64>,
    time_len: usize,
    source_lens: Vec<usize>,
    signal_len: usize,
}

impl RasterCoefficients {
    pub fn time_len(&self) -> usize {
        self.time_len
    }

    pub fn channel_count(&self) -> usize {
        self.source_lens.len()
    }

    /// Channel lengths before rasterization.
    pub fn source_lens(&self) -> &[usize] {
        &self.source_lens
    }

    pub fn signal_len(&self) -> usize {
        self.signal_len
    }

    pub fn channel(&self, k: usize) -> &[Complex64] {
        &self.data[k * self.time_len..(k + 1) * self.time_len]
    }

    pub fn channel_mut(&mut self, k: usize) -> &mut [Complex64] {
        &mut self.data[k * self.time_len..(k + 1) * self.time_len]
    }

    pub fn get(&self, t: usize, k: usize) -> Complex64 {
        self.data[k * self.time_len + t]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(Complex64::norm_sqr).sum()
    }
}

/// Resamples every channel to the longest channel length.
pub fn rasterize<P: FftPlanner>(
    c: &RaggedCoefficients,
    planner: &mut P,
) -> Result<RasterCoefficients> {
    let t = c.lens().into_iter().max().unwrap_or(0);
    rasterize_to(c, t, planner)
}

/// Resamples every channel to `t` points; `t` must be at least every length.
pub fn rasterize_to<P: FftPlanner>(
    c: &RaggedCoefficients,
    t: usize,
    planner: &mut P,
) -> Result<RasterCoefficients> {
    if let Some(m) = c.lens().into_iter().find(|&m| m > t || m == 0) {
        return Err(Error::InvalidTarget(format!(
            "cannot rasterize a channel of {m} coefficients to {t} points"
        )));
    }
    let big = planner.plan(t);
    let mut data = Vec::with_capacity(t * c.channel_count());
    let mut out = vec![Complex64::new(0.0, 0.0); t];
    for channel in c.channels() {
        let m = channel.len();
        if m == t {
            data.extend_from_slice(channel);
            continue;
        }
        let mut spec = channel.clone();
        planner.plan(m).forward(&mut spec);
        out.fill(Complex64::new(0.0, 0.0));
        let pos = m.div_ceil(2);
        out[..pos].copy_from_slice(&spec[..pos]);
        let neg = m / 2;
        out[t - neg..].copy_from_slice(&spec[m - neg..]);
        if m % 2 == 0 {
            let nyq = spec[m / 2] * 0.5;
            out[m / 2] = nyq;
            out[t - m / 2] = nyq;
        }
        big.inverse(&mut out);
        let scale = 1.0 / m as f64;
        data.extend(out.iter().map(|v| v * scale));
    }
    Ok(RasterCoefficients {
        data,
        time_len: t,
        source_lens: c.lens(),
        signal_len: c.signal_len(),
    })
}

/// Inverse of [`rasterize`], back to the recorded source lengths.
pub fn derasterize<P: FftPlanner>(
    r: &RasterCoefficients,
    planner: &mut P,
) -> Result<RaggedCoefficients> {
    derasterize_to(r, &r.source_lens.clone(), planner)
}

/// Truncates each channel's spectrum to `lens[k]` bins. Exact inverse of
/// rasterization for content that was band-limited to those lengths.
pub fn derasterize_to<P: FftPlanner>(
    r: &RasterCoefficients,
    lens: &[usize],
    planner: &mut P,
) -> Result<RaggedCoefficients> {
    if lens.len() != r.channel_count() {
        return Err(Error::ShapeMismatch(format!(
            "{} target lengths for {} channels",
            lens.len(),
            r.channel_count()
        )));
    }
    let t = r.time_len;
    if let Some(&m) = lens.iter().find(|&&m| m > t || m == 0) {
        return Err(Error::InvalidTarget(format!(
            "cannot derasterize {t} points to {m} coefficients"
        )));
    }
    let big = planner.plan(t);
    let mut spec = vec![Complex64::new(0.0, 0.0); t];
    let channels = lens
        .iter()
        .enumerate()
        .map(|(k, &m)| {
            if m == t {
                return r.channel(k).to_vec();
            }
            spec.copy_from_slice(r.channel(k));
            big.forward(&mut spec);
            let mut small = vec![Complex64::new(0.0, 0.0); m];
            let pos = m.div_ceil(2);
            small[..pos].copy_from_slice(&spec[..pos]);
            let neg = m / 2;
            small[m - neg..].copy_from_slice(&spec[t - neg..]);
            if m % 2 == 0 {
                small[m / 2] = spec[m / 2] + spec[t - m / 2];
            }
            planner.plan(m).inverse(&mut small);
            let scale = 1.0 / t as f64;
            small.iter().map(|v| v * scale).collect()
        })
        .collect();
    Ok(RaggedCoefficients::new(channels, r.signal_len))
}
