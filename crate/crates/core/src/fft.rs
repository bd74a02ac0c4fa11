//! Pluggable FFT backend.
//!
//! Both directions are unnormalized: `forward` computes
//! `X[j] = sum_l x[l] e^{-2 pi i j l / n}` and `inverse` the same sum with a
//! positive exponent. Callers apply any scaling they need.

use num_complex::Complex64;

/// A planned transform of one fixed length.
pub trait Fft {
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    fn forward(&self, buf: &mut [Complex64]);
    fn inverse(&self, buf: &mut [Complex64]);
}

pub trait FftPlanner {
    type Plan: Fft + Clone;

    /// Plan a transform of `len` points. Any `len >= 1` must be supported.
    fn plan(&mut self, len: usize) -> Self::Plan;
}

#[cfg(feature = "rustfft")]
pub use self::rustfft_backend::{RustFftPlan, RustFftPlanner};

#[cfg(feature = "rustfft")]
mod rustfft_backend {
    use std::sync::Arc;

    use num_complex::Complex64;

    use super::{Fft, FftPlanner};

    /// Planner backed by `rustfft`; plans for repeated lengths are shared.
    pub struct RustFftPlanner {
        inner: rustfft::FftPlanner<f64>,
    }

    impl RustFftPlanner {
        pub fn new() -> Self {
            Self {
                inner: rustfft::FftPlanner::new(),
            }
        }
    }

    impl Default for RustFftPlanner {
        fn default() -> Self {
            Self::new()
        }
    }

    #[derive(Clone)]
    pub struct RustFftPlan {
        forward: Arc<dyn rustfft::Fft<f64>>,
        inverse: Arc<dyn rustfft::Fft<f64>>,
    }

    impl Fft for RustFftPlan {
        fn len(&self) -> usize {
            self.forward.len()
        }

        fn forward(&self, buf: &mut [Complex64]) {
            self.forward.process(buf);
        }

        fn inverse(&self, buf: &mut [Complex64]) {
            self.inverse.process(buf);
        }
    }

    impl FftPlanner for RustFftPlanner {
        type Plan = RustFftPlan;

        fn plan(&mut self, len: usize) -> RustFftPlan {
            RustFftPlan {
                forward: self.inner.plan_fft_forward(len),
                inverse: self.inner.plan_fft_inverse(len),
            }
        }
    }
}
