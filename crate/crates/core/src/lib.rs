//! Perfectly invertible constant-Q transform built on painless nonstationary
//! Gabor frames, and its sliced, linear-cost variant for streaming use.
//!
//! The crate is `no_std` (with `alloc`). FFTs go through the [`fft::Fft`] and
//! [`fft::FftPlanner`] traits; the default `rustfft` feature (which implies
//! `std`) provides [`fft::RustFftPlanner`].
//!
//! ```
//! use num_complex::Complex64;
//! use slicq_core::{build_cq_system, CqParams, NsgTransform, RustFftPlanner};
//!
//! let params = CqParams::default();
//! let system = build_cq_system(&params, 8192).unwrap();
//! let nsgt = NsgTransform::new(system, &mut RustFftPlanner::new()).unwrap();
//!
//! let f: Vec<Complex64> = (0..8192).map(|i| Complex64::new((i as f64 * 0.01).sin(), 0.0)).collect();
//! let c = nsgt.analyze(&f).unwrap();
//! let g = nsgt.synthesize(&c).unwrap();
//! let err: f64 = f.iter().zip(&g).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
//! assert!(err < 1e-9);
//! ```

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod error;
mod math;

pub mod cq;
pub mod fft;
pub mod frame;
pub mod processing;
pub mod slicq;
pub mod transform;

pub use cq::{build_cq_system, cq_layout, CqDesign, CqLayout, CqParams, WindowShape};
pub use error::{Error, Result};
#[cfg(feature = "rustfft")]
pub use fft::RustFftPlanner;
pub use fft::{Fft, FftPlanner};
pub use frame::{
    canonical_dual, frame_diagonal, is_painless_frame, Filter, FrameCheck, FrameDiagonal,
    FrameViolation, NsgSystem,
};
pub use num_complex::Complex64;
pub use slicq::{
    approximation_error, dual_slicing_window, make_slicing_window, residual_bound,
    slicq_spectrogram, ApproximationReport, SliceFrame, SliceStream, SlicedCoefficients,
    SlicingWindow, Slicq, WINDOW_PRESETS,
};
pub use transform::{NsgTransform, RaggedCoefficients};
