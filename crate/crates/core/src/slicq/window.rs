//! Tukey slicing windows.
//!
//! `h_0` lives on a frame of `2N` samples: `(N - M) / 2` zeros, a rising
//! `sin^2` ramp of length `M`, `N - M` ones, a falling `cos^2` ramp and the
//! remaining zeros. Slice `m` covers global samples `[(m - 1)N, (m + 1)N)`,
//! so its half-height interval is `[mN - N/2, mN + N/2)` and translates by
//! `N` sum to one.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{cos, sin, PI};

/// `(N, M)` pairs shipped as named presets: half slice length and transition.
pub const WINDOW_PRESETS: [(usize, usize); 6] = [
    (2048, 256),
    (8192, 1024),
    (8192, 2048),
    (8192, 64),
    (2048, 512),
    (2048, 16),
];

#[derive(Debug, Clone, PartialEq)]
pub struct SlicingWindow {
    half_len: usize,
    transition: usize,
    values: Vec<f64>,
}

/// Tukey window with hop `n` and transition `m`; both even, `0 < m < n`.
pub fn make_slicing_window(n: usize, m: usize) -> Result<SlicingWindow> {
    if m == 0 || m >= n || n % 2 != 0 || m % 2 != 0 {
        return Err(Error::InvalidParams(format!(
            "slicing window needs even N and M with 0 < M < N, got N = {n}, M = {m}"
        )));
    }
    let pad = (n - m) / 2;
    let mut values = vec![0.0; 2 * n];
    for i in 0..m {
        let t = PI * (i as f64 + 0.5) / (2 * m) as f64;
        let (s, c) = (sin(t), cos(t));
        values[pad + i] = s * s;
        values[pad + n + i] = c * c;
    }
    values[pad + m..pad + n].fill(1.0);
    Ok(SlicingWindow {
        half_len: n,
        transition: m,
        values,
    })
}

/// The synthesis window: constant one over the whole frame.
pub fn dual_slicing_window(window: &SlicingWindow) -> SlicingWindow {
    SlicingWindow {
        half_len: window.half_len,
        transition: window.transition,
        values: vec![1.0; 2 * window.half_len],
    }
}

impl SlicingWindow {
    /// Hop size `N`.
    pub fn half_len(&self) -> usize {
        self.half_len
    }

    /// Frame length `2N`.
    pub fn slice_len(&self) -> usize {
        2 * self.half_len
    }

    pub fn transition(&self) -> usize {
        self.transition
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Frame positions with nonzero weight.
    pub fn support(&self) -> core::ops::Range<usize> {
        let pad = (self.half_len - self.transition) / 2;
        pad..pad + self.half_len + self.transition
    }

    pub fn dual(&self) -> SlicingWindow {
        dual_slicing_window(self)
    }

    /// Weight of slice `m` at global sample `t` of a length-`len` signal.
    pub fn weight(&self, m: usize, t: usize, len: usize) -> f64 {
        let start = ((m as i64 - 1) * self.half_len as i64).rem_euclid(len as i64) as usize;
        let local = (t + len - start) % len;
        self.values.get(local).copied().unwrap_or(0.0)
    }

    /// `sum_m T_{mN}(h_0 h~_0)` on `Z_len`; `len` must be a multiple of `2N`.
    pub fn overlap_sum(&self, dual: &SlicingWindow, len: usize) -> Result<Vec<f64>> {
        let n = self.half_len;
        if dual.values.len() != self.values.len() {
            return Err(Error::ShapeMismatch(
                "window and dual frame lengths differ".into(),
            ));
        }
        if len == 0 || len % (2 * n) != 0 {
            return Err(Error::InvalidParams(format!(
                "length {len} is not a multiple of {}",
                2 * n
            )));
        }
        let mut sum = vec![0.0; len];
        for m in 0..len / n {
            let start = (m + len / n - 1) % (len / n) * n;
            for (j, (h, d)) in self.values.iter().zip(&dual.values).enumerate() {
                sum[(start + j) % len] += h * d;
            }
        }
        Ok(sum)
    }

    /// `max_j |sum_m T_{mN} h_0[j] - 1|` on `Z_len`.
    pub fn partition_deviation(&self, len: usize) -> Result<f64> {
        let ones = self.dual();
        Ok(max_dev(&self.overlap_sum(&ones, len)?))
    }

    /// `max_j |sum_m T_{mN}(h_0 h~_0)[j] - 1|` on `Z_len`.
    pub fn dual_deviation(&self, dual: &SlicingWindow, len: usize) -> Result<f64> {
        Ok(max_dev(&self.overlap_sum(dual, len)?))
    }
}

fn max_dev(sum: &[f64]) -> f64 {
    sum.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_of_default_window() {
        let w = make_slicing_window(8192, 2048).unwrap();
        assert_eq!(w.values().len(), 16384);
        assert_eq!(w.support(), 3072..13312);
        assert_eq!(w.support().len(), 10240);
        assert!(w.values()[..3072].iter().all(|&v| v == 0.0));
        assert!(w.values()[13312..].iter().all(|&v| v == 0.0));
        assert!(w.values()[5120..11264].iter().all(|&v| v == 1.0));
    }

    #[test]
    fn neighbors_sum_to_one_on_overlap() {
        for (n, m) in [(16, 2), (512, 128), (8192, 64)] {
            let w = make_slicing_window(n, m).unwrap();
            let v = w.values();
            let worst = (n..2 * n)
                .map(|j| (v[j] + v[j - n] - 1.0).abs())
                .fold(0.0, f64::max);
            assert!(worst <= 1e-15, "N = {n}, M = {m}: {worst}");
        }
    }

    #[test]
    fn presets_are_partitions_of_unity() {
        for (n, m) in WINDOW_PRESETS {
            let w = make_slicing_window(n, m).unwrap();
            assert!(w.partition_deviation(8 * n).unwrap() <= 1e-12);
            assert!(w.dual_deviation(&w.dual(), 8 * n).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn squared_window_is_not_a_dual() {
        let w = make_slicing_window(512, 128).unwrap();
        assert!(w.dual_deviation(&w, 8 * 512).unwrap() > 0.1);
    }

    #[test]
    fn minimal_transition_is_nearly_rectangular() {
        let w = make_slicing_window(64, 2).unwrap();
        let ones = w.values().iter().filter(|&&v| v == 1.0).count();
        assert_eq!(ones, 62);
        assert_eq!(w.support().len(), 66);
    }

    #[test]
    fn weights_follow_the_index_map() {
        let w = make_slicing_window(8, 2).unwrap();
        let len = 32;
        for t in 0..len {
            let total: f64 = (0..len / 8).map(|m| w.weight(m, t, len)).sum();
            assert!((total - 1.0).abs() < 1e-15);
        }
        // Slice 1 is flat around sample 8.
        assert_eq!(w.weight(1, 8, len), 1.0);
        assert_eq!(w.weight(1, 4 + 12, len), 0.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(make_slicing_window(8, 8).is_err());
        assert!(make_slicing_window(8, 0).is_err());
        assert!(make_slicing_window(9, 2).is_err());
        assert!(make_slicing_window(8, 3).is_err());
    }
}
