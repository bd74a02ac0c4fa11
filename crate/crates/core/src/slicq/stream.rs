//! Bounded-latency sliced analysis.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::Slicq;
use crate::fft::Fft;
use crate::transform::RaggedCoefficients;

/// Coefficients of one slice, tagged with where they belong.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceFrame {
    /// Slice index `m`; the frame covers stream samples `[(m - 1)N, (m + 1)N)`.
    pub index: usize,
    /// `m mod 2`.
    pub layer: usize,
    /// Per-channel global offset `(m - 1) M_k / 2` of coefficient 0.
    pub offsets: Vec<i64>,
    pub coefficients: RaggedCoefficients,
}

/// Push-based analyzer. Samples before the stream start count as zero, so
/// every frame except the first matches the offline analysis of the same
/// signal. A frame is emitted as soon as its last sample arrives, at most
/// `2N` samples after its first one.
#[derive(Clone)]
pub struct SliceStream<F> {
    slicq: Slicq<F>,
    buffer: Vec<Complex64>,
    filled: usize,
    next_index: usize,
    pushed: usize,
    flushed: bool,
}

impl<F: Fft + Clone> SliceStream<F> {
    pub fn new(slicq: Slicq<F>) -> Self {
        let buffer = vec![Complex64::new(0.0, 0.0); slicq.slice_len()];
        Self {
            slicq,
            buffer,
            filled: 0,
            next_index: 0,
            pushed: 0,
            flushed: false,
        }
    }

    /// Total samples pushed so far.
    pub fn samples_pushed(&self) -> usize {
        self.pushed
    }

    pub fn push(&mut self, samples: &[Complex64]) -> Vec<SliceFrame> {
        let n = self.slicq.half_len();
        let mut frames = Vec::new();
        let mut rest = samples;
        while !rest.is_empty() {
            let take = (n - self.filled).min(rest.len());
            self.buffer[n + self.filled..n + self.filled + take].copy_from_slice(&rest[..take]);
            self.filled += take;
            self.pushed += take;
            rest = &rest[take..];
            if self.filled == n {
                frames.push(self.emit());
            }
        }
        frames
    }

    pub fn push_real(&mut self, samples: &[f64]) -> Vec<SliceFrame> {
        let samples: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.push(&samples)
    }

    /// Emits the partially filled hop, if any, and a final frame whose second
    /// half is zero. Later calls return nothing.
    pub fn flush(&mut self) -> Vec<SliceFrame> {
        let mut frames = Vec::new();
        if self.flushed || self.pushed == 0 {
            return frames;
        }
        if self.filled > 0 {
            frames.push(self.emit());
        }
        frames.push(self.emit());
        self.flushed = true;
        frames
    }

    fn emit(&mut self) -> SliceFrame {
        let n = self.slicq.half_len();
        let windowed: Vec<Complex64> = self
            .buffer
            .iter()
            .zip(self.slicq.window().values())
            .map(|(v, &h)| v * h)
            .collect();
        let coefficients = self
            .slicq
            .analyze_slice(&windowed)
            .expect("frame length matches the slice system");
        let m = self.next_index;
        let offsets = self
            .slicq
            .coef_counts()
            .iter()
            .map(|&c| (m as i64 - 1) * (c / 2) as i64)
            .collect();
        self.buffer.copy_within(n.., 0);
        self.buffer[n..].fill(Complex64::new(0.0, 0.0));
        self.filled = 0;
        self.next_index += 1;
        SliceFrame {
            index: m,
            layer: m % 2,
            offsets,
            coefficients,
        }
    }
}
