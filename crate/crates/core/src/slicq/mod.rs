//! Sliced constant-Q transform.
//!
//! The signal is cut into overlapping Tukey-windowed slices of length `2N`
//! with hop `N`. Each slice is transformed by a fixed length-`2N` system and
//! its coefficients are placed on the global time axis, alternating between
//! two layers so that neighboring slices never collide. With a constant-one
//! synthesis window, inverse transforms of the slices overlap-add back to the
//! input exactly.

mod approx;
mod stream;
mod window;

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{Fft, FftPlanner};
use crate::frame::NsgSystem;
use crate::transform::{real_part_checked, NsgTransform, RaggedCoefficients};

pub use approx::{approximation_error, residual_bound, ApproximationReport};
pub use stream::{SliceFrame, SliceStream};
pub use window::{dual_slicing_window, make_slicing_window, SlicingWindow, WINDOW_PRESETS};

/// Two-layer coefficients on the global time axis of a length-`L` signal.
/// Channel `k` of each layer has `M_k * L / 2N` entries, `M_k` being the
/// slice system's coefficient count.
#[derive(Debug, Clone, PartialEq)]
pub struct SlicedCoefficients {
    layers: [RaggedCoefficients; 2],
    slice_counts: Vec<usize>,
    half_len: usize,
    transition: usize,
}

impl SlicedCoefficients {
    /// All-zero coefficients for signals of length `len` (a multiple of `2n`).
    pub fn zeros(slice_counts: &[usize], len: usize, n: usize, m: usize) -> Result<Self> {
        check_even_counts(slice_counts)?;
        if n == 0 || len % (2 * n) != 0 {
            return Err(Error::InvalidParams(format!(
                "length {len} is not a multiple of the slice length {}",
                2 * n
            )));
        }
        let periods = len / (2 * n);
        let lens: Vec<usize> = slice_counts.iter().map(|&c| c * periods).collect();
        let layer = RaggedCoefficients::zeros(&lens, len);
        Ok(Self {
            layers: [layer.clone(), layer],
            slice_counts: slice_counts.to_vec(),
            half_len: n,
            transition: m,
        })
    }

    /// Rebuilds from two layers as stored, e.g. in a file.
    pub fn from_layers(
        layers: [RaggedCoefficients; 2],
        slice_counts: &[usize],
        n: usize,
        m: usize,
    ) -> Result<Self> {
        let len = layers[0].signal_len();
        let expected = Self::zeros(slice_counts, len, n, m)?;
        if !layers
            .iter()
            .all(|l| l.same_shape(&expected.layers[0]) && l.signal_len() == len)
        {
            return Err(Error::ShapeMismatch(
                "layer shapes do not match the slice system".into(),
            ));
        }
        Ok(Self { layers, ..expected })
    }

    pub fn layer(&self, l: usize) -> &RaggedCoefficients {
        &self.layers[l]
    }

    pub fn layer_mut(&mut self, l: usize) -> &mut RaggedCoefficients {
        &mut self.layers[l]
    }

    pub fn layers(&self) -> &[RaggedCoefficients; 2] {
        &self.layers
    }

    pub fn signal_len(&self) -> usize {
        self.layers[0].signal_len()
    }

    pub fn half_len(&self) -> usize {
        self.half_len
    }

    pub fn slice_len(&self) -> usize {
        2 * self.half_len
    }

    pub fn transition(&self) -> usize {
        self.transition
    }

    /// Coefficient counts of the slice system.
    pub fn slice_counts(&self) -> &[usize] {
        &self.slice_counts
    }

    pub fn slice_count(&self) -> usize {
        self.signal_len() / self.half_len
    }

    pub fn channel_count(&self) -> usize {
        self.slice_counts.len()
    }

    /// Global position of slice coefficient `n_s` of slice `m` in channel `k`.
    fn position(&self, m: usize, k: usize, n_s: usize) -> usize {
        let half = self.slice_counts[k] / 2;
        let total = self.layers[0].channel(k).len();
        ((m + self.slice_count() - 1) % self.slice_count() * half + n_s) % total
    }

    /// The coefficients of slice `m` as produced by the slice system.
    pub fn slice(&self, m: usize) -> RaggedCoefficients {
        let layer = &self.layers[m % 2];
        let channels = (0..self.channel_count())
            .map(|k| {
                let src = layer.channel(k);
                (0..self.slice_counts[k])
                    .map(|n| src[self.position(m, k, n)])
                    .collect()
            })
            .collect();
        RaggedCoefficients::new(channels, self.slice_len())
    }

    /// Overwrites slice `m`'s positions with `c`.
    pub fn insert(&mut self, m: usize, c: &RaggedCoefficients) -> Result<()> {
        self.check_slice_shape(c)?;
        for k in 0..self.channel_count() {
            for (n, &v) in c.channel(k).iter().enumerate() {
                let p = self.position(m, k, n);
                self.layers[m % 2].channel_mut(k)[p] = v;
            }
        }
        Ok(())
    }

    /// Adds a streamed frame at its tagged offsets, wrapping modulo the layer
    /// length. Frames from a stream whose total length is a multiple of `2N`
    /// accumulate to exactly the offline coefficients.
    pub fn accumulate(&mut self, frame: &SliceFrame) -> Result<()> {
        self.check_slice_shape(&frame.coefficients)?;
        if frame.offsets.len() != self.channel_count() {
            return Err(Error::ShapeMismatch(
                "frame offsets do not match the channel count".into(),
            ));
        }
        let layer = &mut self.layers[frame.layer];
        for k in 0..layer.channel_count() {
            let total = layer.channel(k).len() as i64;
            let dst = layer.channel_mut(k);
            for (n, &v) in frame.coefficients.channel(k).iter().enumerate() {
                dst[(frame.offsets[k] + n as i64).rem_euclid(total) as usize] += v;
            }
        }
        Ok(())
    }

    /// `s^0 + s^1`.
    pub fn combined(&self) -> RaggedCoefficients {
        let mut sum = self.layers[0].clone();
        sum.add_assign(&self.layers[1])
            .expect("layers share a shape");
        sum
    }

    /// `|s^0 + s^1|^2` per channel.
    pub fn spectrogram(&self) -> Vec<Vec<f64>> {
        self.combined()
            .channels()
            .iter()
            .map(|c| c.iter().map(Complex64::norm_sqr).collect())
            .collect()
    }

    fn check_slice_shape(&self, c: &RaggedCoefficients) -> Result<()> {
        let ok = c.channel_count() == self.channel_count()
            && c.channels()
                .iter()
                .zip(&self.slice_counts)
                .all(|(ch, &m)| ch.len() == m);
        if ok {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(
                "slice coefficients do not match the slice system".into(),
            ))
        }
    }
}

/// `|s^0 + s^1|^2` per channel.
pub fn slicq_spectrogram(s: &SlicedCoefficients) -> Vec<Vec<f64>> {
    s.spectrogram()
}

fn check_even_counts(counts: &[usize]) -> Result<()> {
    match counts.iter().position(|c| c % 2 != 0) {
        Some(channel) => Err(Error::OddCoefCount {
            channel,
            count: counts[channel],
        }),
        None => Ok(()),
    }
}

/// Sliced analysis/synthesis with a fixed slice system of length `2N`.
#[derive(Clone)]
pub struct Slicq<F> {
    window: SlicingWindow,
    dual_window: SlicingWindow,
    transform: NsgTransform<F>,
}

impl<F: Fft + Clone> Slicq<F> {
    pub fn new<P: FftPlanner<Plan = F>>(
        window: SlicingWindow,
        system: NsgSystem,
        planner: &mut P,
    ) -> Result<Self> {
        if system.signal_len() != window.slice_len() {
            return Err(Error::LengthMismatch {
                expected: window.slice_len(),
                found: system.signal_len(),
            });
        }
        check_even_counts(system.coef_counts())?;
        let dual_window = window.dual();
        let transform = NsgTransform::new(system, planner)?;
        Ok(Self {
            window,
            dual_window,
            transform,
        })
    }

    pub fn window(&self) -> &SlicingWindow {
        &self.window
    }

    pub fn transform(&self) -> &NsgTransform<F> {
        &self.transform
    }

    pub fn half_len(&self) -> usize {
        self.window.half_len()
    }

    pub fn slice_len(&self) -> usize {
        self.window.slice_len()
    }

    pub fn coef_counts(&self) -> &[usize] {
        self.transform.coef_counts()
    }

    /// Windowed frame `x[j] = f[(m - 1)N + j] h_0[j]`, indices modulo `L`.
    fn frame(&self, f: &[Complex64], m: usize) -> Vec<Complex64> {
        let (n, len) = (self.half_len(), f.len());
        let start = (m + len / n - 1) % (len / n) * n;
        self.window
            .values()
            .iter()
            .enumerate()
            .map(|(j, &h)| f[(start + j) % len] * h)
            .collect()
    }

    pub fn analyze_slice(&self, frame: &[Complex64]) -> Result<RaggedCoefficients> {
        self.transform.analyze(frame)
    }

    pub fn analyze(&self, f: &[Complex64]) -> Result<SlicedCoefficients> {
        let len = f.len();
        if len == 0 || len % self.slice_len() != 0 {
            let expected = len.div_ceil(self.slice_len()).max(1) * self.slice_len();
            return Err(Error::LengthMismatch {
                expected,
                found: len,
            });
        }
        let mut s = SlicedCoefficients::zeros(
            self.coef_counts(),
            len,
            self.half_len(),
            self.window.transition(),
        )?;
        for m in 0..s.slice_count() {
            let c = self.transform.analyze(&self.frame(f, m))?;
            s.insert(m, &c)?;
        }
        Ok(s)
    }

    pub fn synthesize(&self, s: &SlicedCoefficients) -> Result<Vec<Complex64>> {
        if s.slice_counts() != self.coef_counts() || s.half_len() != self.half_len() {
            return Err(Error::ShapeMismatch(
                "sliced coefficients were made with a different slice system".into(),
            ));
        }
        let (n, len) = (self.half_len(), s.signal_len());
        let mut out = alloc::vec![Complex64::new(0.0, 0.0); len];
        for m in 0..s.slice_count() {
            let part = self.transform.synthesize(&s.slice(m))?;
            let start = (m + len / n - 1) % (len / n) * n;
            for (j, (v, &d)) in part.iter().zip(self.dual_window.values()).enumerate() {
                out[(start + j) % len] += v * d;
            }
        }
        Ok(out)
    }

    pub fn real_analyze(&self, f: &[f64]) -> Result<SlicedCoefficients> {
        let f: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.analyze(&f)
    }

    pub fn real_synthesize(&self, s: &SlicedCoefficients) -> Result<Vec<f64>> {
        real_part_checked(&self.synthesize(s)?)
    }

    /// A streaming analyzer sharing this slice system.
    pub fn stream(&self) -> SliceStream<F> {
        SliceStream::new(self.clone())
    }
}
