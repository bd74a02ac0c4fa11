use alloc::string::String;
use core::fmt;

use crate::frame::FrameViolation;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A signal did not have the length the system was built for.
    LengthMismatch {
        expected: usize,
        found: usize,
    },
    /// Coefficient, mask or system shapes disagree.
    ShapeMismatch(String),
    /// The system fails the painless frame test.
    NotAFrame(FrameViolation),
    InvalidParams(String),
    /// The filterbank could not be built for the requested length.
    DesignFailure(String),
    /// Slicing needs every coefficient count of the slice system to be even.
    OddCoefCount {
        channel: usize,
        count: usize,
    },
    /// Synthesis of supposedly real coefficients left a non-negligible imaginary part.
    NonRealResult {
        max_imag: f64,
        bound: f64,
    },
    /// A channel shift would move content outside the geometric bands.
    RangeError(String),
    InvalidTarget(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::LengthMismatch { expected, found } => {
                write!(
                    f,
                    "signal length mismatch: expected {expected}, found {found}"
                )
            }
            Error::ShapeMismatch(msg) => write!(f, "shape mismatch: {msg}"),
            Error::NotAFrame(v) => write!(f, "system is not a painless frame: {v}"),
            Error::InvalidParams(msg) => write!(f, "invalid parameters: {msg}"),
            Error::DesignFailure(msg) => write!(f, "filterbank design failed: {msg}"),
            Error::OddCoefCount { channel, count } => {
                write!(f, "channel {channel} has odd coefficient count {count}; slicing needs even counts")
            }
            Error::NonRealResult { max_imag, bound } => {
                write!(
                    f,
                    "synthesis is not real: max |imag| = {max_imag:e} exceeds {bound:e}"
                )
            }
            Error::RangeError(msg) => write!(f, "channel range error: {msg}"),
            Error::InvalidTarget(msg) => write!(f, "invalid raster target: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
