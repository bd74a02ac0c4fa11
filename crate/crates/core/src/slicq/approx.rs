//! How closely sliced coefficients follow the full-length transform.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::{SlicedCoefficients, SlicingWindow};
use crate::error::{Error, Result};
use crate::fft::{Fft, FftPlanner};
use crate::frame::NsgSystem;
use crate::math::{log10, sqrt, unit_phase};
use crate::transform::RaggedCoefficients;

#[derive(Debug, Clone, PartialEq)]
pub struct ApproximationReport {
    /// `20 log10(||c|| / ||c - (s^0 + s^1)||)`; infinite when the residual vanishes.
    pub snr_db: f64,
    pub coef_norm: f64,
    pub error_norm: f64,
    /// `s^0 + s^1 - c`.
    pub residual: RaggedCoefficients,
}

impl ApproximationReport {
    pub fn is_exact(&self) -> bool {
        self.error_norm == 0.0
    }
}

/// Compares full-length coefficients `c` with sliced coefficients `s` laid
/// out on the same grid.
pub fn approximation_error(
    c: &RaggedCoefficients,
    s: &SlicedCoefficients,
) -> Result<ApproximationReport> {
    let mut residual = s.combined();
    if !residual.same_shape(c) {
        return Err(Error::ShapeMismatch(format!(
            "full-length coefficients have lengths {:?}, sliced layers {:?}",
            c.lens(),
            residual.lens()
        )));
    }
    for (r, v) in residual
        .channels_mut()
        .iter_mut()
        .flatten()
        .zip(c.channels().iter().flatten())
    {
        *r -= v;
    }
    let coef_norm = c.norm();
    let error_norm = residual.norm();
    let snr_db = if error_norm == 0.0 {
        f64::INFINITY
    } else {
        20.0 * log10(coef_norm / error_norm)
    };
    Ok(ApproximationReport {
        snr_db,
        coef_norm,
        error_norm,
        residual,
    })
}

/// Per-coefficient bound on `|s^0 + s^1 - c| / ||f||_2`.
///
/// `full` is the length-`L` system whose filters, sampled at every
/// `L / 2N`-th bin, give the slice system. For global position `p` covered
/// by slices `q` and `q + 1` with windows `w_q`, `w_{q+1}`, the bound is
/// `||(1 - w_q - w_{q+1}) phi_p|| + ||(w_q + w_{q+1}) sum_{j=1}^{r-1} T_{2jN} phi_p||`
/// where `phi_p` is the full-length atom. Costs one length-`L` FFT per
/// coefficient, so it is meant for small diagnostic sizes.
pub fn residual_bound<P: FftPlanner>(
    full: &NsgSystem,
    window: &SlicingWindow,
    planner: &mut P,
) -> Result<Vec<Vec<f64>>> {
    let len = full.signal_len();
    let (n, slice_len) = (window.half_len(), window.slice_len());
    if len % slice_len != 0 {
        return Err(Error::LengthMismatch {
            expected: len.div_ceil(slice_len) * slice_len,
            found: len,
        });
    }
    let ratio = len / slice_len;
    let slices = len / n;
    let fft = planner.plan(len);
    let scale = 1.0 / sqrt(len as f64);

    let mut bounds = Vec::with_capacity(full.channel_count());
    let mut atom = vec![Complex64::new(0.0, 0.0); len];
    for (k, (g, &m_full)) in full.filters().iter().zip(full.coef_counts()).enumerate() {
        if m_full % (2 * ratio) != 0 {
            return Err(Error::ShapeMismatch(format!(
                "channel {k}: {m_full} coefficients do not split into even counts per slice"
            )));
        }
        let half = m_full / ratio / 2;
        let mut channel = Vec::with_capacity(m_full);
        let mut weights = vec![0.0; len];
        let mut weights_for = usize::MAX;
        for p in 0..m_full {
            let q = p / half;
            if q != weights_for {
                for (t, w) in weights.iter_mut().enumerate() {
                    *w =
                        window.weight(q % slices, t, len) + window.weight((q + 1) % slices, t, len);
                }
                weights_for = q;
            }

            atom.fill(Complex64::new(0.0, 0.0));
            let start = g.unwrapped_start(len);
            for (i, (bin, v)) in g.support(len).enumerate() {
                let jp = ((start + i as i64) * p as i64).rem_euclid(m_full as i64) as u64;
                atom[bin] = v * unit_phase(jp, m_full as u64).conj();
            }
            fft.inverse(&mut atom);

            let (mut inside, mut spill) = (0.0, 0.0);
            for t in 0..len {
                let phi = atom[t] * scale;
                inside += (1.0 - weights[t]) * (1.0 - weights[t]) * phi.norm_sqr();
                let mut wrapped = Complex64::new(0.0, 0.0);
                for j in 1..ratio {
                    wrapped += atom[(t + 2 * j * n) % len] * scale;
                }
                spill += weights[t] * weights[t] * wrapped.norm_sqr();
            }
            channel.push(sqrt(inside) + sqrt(spill));
        }
        bounds.push(channel);
    }
    Ok(bounds)
}
