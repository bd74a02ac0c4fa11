//! Pitch transposition by shifting constant-Q channels.
//!
//! Coefficients of channel `k` carry the phase `e^{2 pi i j n / M_k}` of the
//! absolute frequency bin `j`. Moving them verbatim to another channel would
//! keep that phase pattern, which after synthesis aliases back to the
//! original frequency. Channels are therefore demodulated by their center
//! bin first, moved on a common raster and remodulated with the new center.
//!
//! A slice shifted by `d` bins is modulated relative to its own start, so
//! slices `N` samples apart disagree by `(-1)^d`. Sliced transposition
//! refers every slice to time zero, which keeps a shifted tone continuous.
//! No phase coherence between neighboring channels is restored.

use alloc::format;

use crate::cq::mirror_channel;
use crate::error::{Error, Result};
use crate::fft::FftPlanner;
use crate::frame::NsgSystem;
use crate::math::unit_phase;
use crate::processing::raster::{derasterize_to, rasterize, RasterCoefficients};
use crate::slicq::SlicedCoefficients;
use crate::transform::RaggedCoefficients;

/// Moves channels `low..=high` by `shift` channels. Channel numbers refer
/// to the constant-Q layout, whose geometric bands are `1..=K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transposition {
    pub shift: i64,
    pub low: usize,
    pub high: usize,
    /// Rebuild the mirrored channels as conjugates, as for a real signal.
    pub real: bool,
}

impl Transposition {
    /// The widest source range that stays inside `1..=bands` after shifting.
    pub fn whole(shift: i64, bands: usize, real: bool) -> Result<Self> {
        if shift.unsigned_abs() as usize >= bands {
            return Err(Error::RangeError(format!(
                "shift {shift} leaves no channel inside 1..={bands}"
            )));
        }
        let (low, high) = if shift >= 0 {
            (1, bands - shift as usize)
        } else {
            (1 + (-shift) as usize, bands)
        };
        Ok(Self {
            shift,
            low,
            high,
            real,
        })
    }

    fn check(&self, bands: usize) -> Result<()> {
        let dst_low = self.low as i64 + self.shift;
        let dst_high = self.high as i64 + self.shift;
        if self.low < 1
            || self.high > bands
            || self.low > self.high
            || dst_low < 1
            || dst_high > bands as i64
        {
            return Err(Error::RangeError(format!(
                "channels {}..={} shifted by {} leave the band range 1..={bands}",
                self.low, self.high, self.shift
            )));
        }
        Ok(())
    }
}

fn bands_of(channels: usize) -> Result<usize> {
    if channels < 4 || channels % 2 != 0 {
        return Err(Error::ShapeMismatch(format!(
            "{channels} channels is not a mirrored constant-Q layout"
        )));
    }
    Ok((channels - 2) / 2)
}

fn modulate(c: &mut RaggedCoefficients, system: &NsgSystem, inverse: bool) -> Result<()> {
    if c.lens() != system.coef_counts() {
        return Err(Error::ShapeMismatch(
            "coefficients do not match the system".into(),
        ));
    }
    for k in 0..c.channel_count() {
        let center = system.filter(k).center_bin() as u64;
        let m = c.channel(k).len() as u64;
        for (n, v) in c.channel_mut(k).iter_mut().enumerate() {
            let phase = unit_phase(center * n as u64, m);
            *v *= if inverse { phase } else { phase.conj() };
        }
    }
    Ok(())
}

/// Multiplies channel `k` by `e^{-2 pi i w_k n / M_k}`, moving each
/// channel's content to baseband. A real signal then has mirrored channels
/// that are exact complex conjugates.
pub fn demodulate(c: &mut RaggedCoefficients, system: &NsgSystem) -> Result<()> {
    modulate(c, system, false)
}

/// Inverse of [`demodulate`].
pub fn remodulate(c: &mut RaggedCoefficients, system: &NsgSystem) -> Result<()> {
    modulate(c, system, true)
}

/// Relocates raster rows verbatim. Source rows not overwritten are zeroed;
/// plateau channels are left alone; with `real` set the mirrored channels
/// are replaced by conjugates of the geometric ones.
pub fn transpose_bins(r: &RasterCoefficients, t: &Transposition) -> Result<RasterCoefficients> {
    let bands = bands_of(r.channel_count())?;
    t.check(bands)?;
    let mut out = r.clone();
    if t.shift != 0 {
        for k in t.low..=t.high {
            out.channel_mut(k)
                .fill(num_complex::Complex64::new(0.0, 0.0));
        }
        for k in t.low..=t.high {
            let dst = (k as i64 + t.shift) as usize;
            out.channel_mut(dst).copy_from_slice(r.channel(k));
        }
    }
    if t.real {
        for k in 1..=bands {
            let mirror = mirror_channel(bands, k);
            for i in 0..out.time_len() {
                let v = out.get(i, k).conj();
                out.channel_mut(mirror)[i] = v;
            }
        }
    }
    Ok(out)
}

/// Demodulate, rasterize, shift, derasterize and remodulate.
pub fn transpose_coefficients<P: FftPlanner>(
    system: &NsgSystem,
    c: &RaggedCoefficients,
    t: &Transposition,
    planner: &mut P,
) -> Result<RaggedCoefficients> {
    let mut base = c.clone();
    demodulate(&mut base, system)?;
    let raster = rasterize(&base, planner)?;
    let moved = transpose_bins(&raster, t)?;
    let mut out = derasterize_to(&moved, system.coef_counts(), planner)?;
    remodulate(&mut out, system)?;
    Ok(out)
}

/// Slice-by-slice [`transpose_coefficients`] with the slice system.
pub fn transpose_sliced<P: FftPlanner>(
    slice_system: &NsgSystem,
    s: &SlicedCoefficients,
    t: &Transposition,
    planner: &mut P,
) -> Result<SlicedCoefficients> {
    let bands = bands_of(slice_system.channel_count())?;
    t.check(bands)?;
    // Destination channels whose bin shift is odd.
    let mut odd = alloc::vec![false; slice_system.channel_count()];
    for k in t.low..=t.high {
        let dst = (k as i64 + t.shift) as usize;
        let d = slice_system.filter(dst).center_bin() as i64
            - slice_system.filter(k).center_bin() as i64;
        if d % 2 != 0 {
            odd[dst] = true;
            if t.real {
                odd[mirror_channel(bands, dst)] = true;
            }
        }
    }
    let mut out = s.clone();
    let slices = s.slice_count();
    for m in 0..slices {
        let mut moved = transpose_coefficients(slice_system, &s.slice(m), t, planner)?;
        // Slice m starts at ((m - 1) mod S) * N and S is even.
        if (m + slices - 1) % 2 == 1 {
            for (k, _) in odd.iter().enumerate().filter(|(_, &o)| o) {
                moved.channel_mut(k).iter_mut().for_each(|v| *v = -*v);
            }
        }
        out.insert(m, &moved)?;
    }
    Ok(out)
}
