//! Painless nonstationary Gabor systems in the frequency domain.
//!
//! A system is a set of real filters `g_k` on the DFT bins of a length-`L`
//! signal, each with a coefficient count `M_k = L / a_k`. When every filter's
//! support fits into `M_k` bins (the painless condition) the frame operator is
//! diagonal in frequency, with entries `sum_k M_k |g_k[j]|^2`, and the
//! canonical dual is obtained by dividing each filter by that diagonal.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// A real filter stored over its (circular) support interval only.
#[derive(Debug, Clone, PartialEq)]
pub struct Filter {
    values: Vec<f64>,
    support_start: usize,
    center_bin: usize,
}

impl Filter {
    pub fn new(values: Vec<f64>, support_start: usize, center_bin: usize) -> Self {
        Self {
            values,
            support_start,
            center_bin,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn support_start(&self) -> usize {
        self.support_start
    }

    pub fn support_len(&self) -> usize {
        self.values.len()
    }

    pub fn center_bin(&self) -> usize {
        self.center_bin
    }

    /// First support bin on the unwrapped axis anchored at the center: the
    /// support covers `center_bin + d` for signed offsets `d`, so the start
    /// may be negative. Refining a system scales this index exactly.
    pub fn unwrapped_start(&self, len: usize) -> i64 {
        let back = (self.center_bin + len - self.support_start % len) % len;
        self.center_bin as i64 - back as i64
    }

    /// `(bin, value)` pairs over the support, bins reduced modulo `len`.
    pub fn support(&self, len: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let mut bin = self.support_start % len;
        self.values.iter().map(move |&v| {
            let here = bin;
            bin += 1;
            if bin == len {
                bin = 0;
            }
            (here, v)
        })
    }

    /// Value at `bin`, zero outside the support.
    pub fn value_at(&self, bin: usize, len: usize) -> f64 {
        let offset = (bin + len - self.support_start % len) % len;
        self.values.get(offset).copied().unwrap_or(0.0)
    }

    fn map_values(&self, mut op: impl FnMut(usize, f64) -> f64, len: usize) -> Filter {
        let values = self.support(len).map(|(bin, v)| op(bin, v)).collect();
        Filter {
            values,
            support_start: self.support_start,
            center_bin: self.center_bin,
        }
    }
}

/// A painless nonstationary Gabor system for signals of length `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct NsgSystem {
    signal_len: usize,
    filters: Vec<Filter>,
    coef_counts: Vec<usize>,
}

impl NsgSystem {
    /// Validates shapes only; whether the system is a frame is reported by
    /// [`is_painless_frame`].
    pub fn new(signal_len: usize, filters: Vec<Filter>, coef_counts: Vec<usize>) -> Result<Self> {
        if signal_len == 0 {
            return Err(Error::InvalidParams(
                "signal length must be positive".into(),
            ));
        }
        if filters.len() != coef_counts.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} filters but {} coefficient counts",
                filters.len(),
                coef_counts.len()
            )));
        }
        for (k, (g, &m)) in filters.iter().zip(&coef_counts).enumerate() {
            if g.support_len() > signal_len {
                return Err(Error::InvalidParams(format!(
                    "filter {k} support {} exceeds signal length {signal_len}",
                    g.support_len()
                )));
            }
            if g.support_start >= signal_len || g.center_bin >= signal_len {
                return Err(Error::InvalidParams(format!(
                    "filter {k} is positioned outside 0..{signal_len}"
                )));
            }
            if m == 0 || m > signal_len {
                return Err(Error::InvalidParams(format!(
                    "channel {k} coefficient count {m} not in 1..={signal_len}"
                )));
            }
            if g.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParams(format!(
                    "filter {k} has non-finite values"
                )));
            }
        }
        Ok(Self {
            signal_len,
            filters,
            coef_counts,
        })
    }

    pub fn signal_len(&self) -> usize {
        self.signal_len
    }

    pub fn filters(&self) -> &[Filter] {
        &self.filters
    }

    pub fn filter(&self, k: usize) -> &Filter {
        &self.filters[k]
    }

    pub fn coef_counts(&self) -> &[usize] {
        &self.coef_counts
    }

    pub fn channel_count(&self) -> usize {
        self.filters.len()
    }

    /// Same filters with different coefficient counts.
    pub fn with_coef_counts(&self, coef_counts: Vec<usize>) -> Result<Self> {
        Self::new(self.signal_len, self.filters.clone(), coef_counts)
    }

    /// Every filter multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let filters = self
            .filters
            .iter()
            .map(|g| g.map_values(|_, v| v * factor, self.signal_len))
            .collect();
        Self {
            signal_len: self.signal_len,
            filters,
            coef_counts: self.coef_counts.clone(),
        }
    }

    pub fn frame_diagonal(&self) -> FrameDiagonal {
        frame_diagonal(self)
    }

    pub fn check_frame(&self) -> FrameCheck {
        is_painless_frame(self)
    }

    pub fn canonical_dual(&self) -> Result<Self> {
        canonical_dual(self)
    }
}

/// Diagonal of the frame operator in the frequency domain.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameDiagonal {
    values: Vec<f64>,
}

impl FrameDiagonal {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Why a system is not a painless frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrameViolation {
    /// `M_k` is smaller than the filter's support.
    NotPainless {
        channel: usize,
        coef_count: usize,
        support_len: usize,
    },
    /// No filter covers this bin.
    Uncovered {
        bin: usize,
    },
    NonFinite {
        bin: usize,
    },
}

impl fmt::Display for FrameViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameViolation::NotPainless { channel, coef_count, support_len } => write!(
                f,
                "channel {channel} has {coef_count} coefficients for a support of {support_len} bins"
            ),
            FrameViolation::Uncovered { bin } => write!(f, "bin {bin} is not covered by any filter"),
            FrameViolation::NonFinite { bin } => write!(f, "frame diagonal is not finite at bin {bin}"),
        }
    }
}

/// Result of the painless frame test, with the frame bounds of the diagonal
/// frame operator (its minimum and maximum entries).
#[derive(Debug, Clone, PartialEq)]
pub struct FrameCheck {
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub violation: Option<FrameViolation>,
}

impl FrameCheck {
    pub fn is_frame(&self) -> bool {
        self.violation.is_none()
    }
}

pub fn frame_diagonal(system: &NsgSystem) -> FrameDiagonal {
    let len = system.signal_len;
    let mut values = vec![0.0f64; len];
    for (g, &m) in system.filters.iter().zip(&system.coef_counts) {
        let weight = m as f64;
        for (bin, v) in g.support(len) {
            values[bin] += weight * v * v;
        }
    }
    FrameDiagonal { values }
}

pub fn is_painless_frame(system: &NsgSystem) -> FrameCheck {
    let diagonal = frame_diagonal(system);
    let lower_bound = diagonal.min();
    let upper_bound = diagonal.max();

    let painless = system
        .filters
        .iter()
        .zip(&system.coef_counts)
        .enumerate()
        .find_map(|(channel, (g, &m))| {
            (m < g.support_len()).then_some(FrameViolation::NotPainless {
                channel,
                coef_count: m,
                support_len: g.support_len(),
            })
        });
    let violation = painless.or_else(|| {
        diagonal.values.iter().enumerate().find_map(|(bin, &d)| {
            if !d.is_finite() {
                Some(FrameViolation::NonFinite { bin })
            } else if d <= 0.0 {
                Some(FrameViolation::Uncovered { bin })
            } else {
                None
            }
        })
    });
    FrameCheck {
        lower_bound,
        upper_bound,
        violation,
    }
}

/// Canonical dual: each filter divided by the frame diagonal.
pub fn canonical_dual(system: &NsgSystem) -> Result<NsgSystem> {
    if let Some(v) = is_painless_frame(system).violation {
        return Err(Error::NotAFrame(v));
    }
    let diagonal = frame_diagonal(system);
    let len = system.signal_len;
    let filters = system
        .filters
        .iter()
        .map(|g| g.map_values(|bin, v| v / diagonal.values[bin], len))
        .collect();
    Ok(NsgSystem {
        signal_len: len,
        filters,
        coef_counts: system.coef_counts.clone(),
    })
}
