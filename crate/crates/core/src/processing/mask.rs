//! Time-frequency gain masks.

use alloc::format;
use alloc::vec::Vec;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::math::pow;
use crate::processing::RasterCoefficients;
use crate::slicq::SlicedCoefficients;
use crate::transform::RaggedCoefficients;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MaskScaling {
    /// `0` maps to -100 dB, `1` to 0 dB, linear in dB in between.
    #[default]
    Db,
    Linear,
}

impl FromStr for MaskScaling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "db" => Ok(MaskScaling::Db),
            "linear" => Ok(MaskScaling::Linear),
            other => Err(Error::InvalidParams(format!(
                "unknown mask scaling {other:?}"
            ))),
        }
    }
}

/// Gain applied for mask value `v` in `[0, 1]`.
pub fn mask_gain(v: f64, scaling: MaskScaling) -> f64 {
    match scaling {
        MaskScaling::Db => pow(10.0, -5.0 * (1.0 - v)),
        MaskScaling::Linear => v,
    }
}

/// A gain grid with `rows` time steps and `cols` channels, values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    scaling: MaskScaling,
}

impl Mask {
    /// `values` is row-major (time-major). Values are clamped to `[0, 1]`;
    /// NaN becomes 0.
    pub fn new(rows: usize, cols: usize, values: Vec<f64>, scaling: MaskScaling) -> Result<Self> {
        if rows == 0 || cols == 0 || values.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} mask values for a {rows} x {cols} grid",
                values.len()
            )));
        }
        let values = values
            .into_iter()
            .map(|v| if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) })
            .collect();
        Ok(Self {
            rows,
            cols,
            values,
            scaling,
        })
    }

    pub fn constant(rows: usize, cols: usize, value: f64, scaling: MaskScaling) -> Result<Self> {
        Self::new(rows, cols, alloc::vec![value; rows * cols], scaling)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn scaling(&self) -> MaskScaling {
        self.scaling
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    pub fn gain(&self, row: usize, col: usize) -> f64 {
        mask_gain(self.value(row, col), self.scaling)
    }

    /// `1 - v` everywhere, same scaling.
    pub fn complement(&self) -> Self {
        Self {
            values: self.values.iter().map(|v| 1.0 - v).collect(),
            ..self.clone()
        }
    }

    /// Nearest row for coefficient `n` of a channel with `len` coefficients.
    fn row_for(&self, n: usize, len: usize) -> usize {
        ((2 * n + 1) * self.rows) / (2 * len)
    }

    fn check_cols(&self, channels: usize) -> Result<()> {
        if self.cols != channels {
            return Err(Error::ShapeMismatch(format!(
                "mask has {} channels, coefficients {channels}",
                self.cols
            )));
        }
        Ok(())
    }

    fn apply_ragged(&self, c: &mut RaggedCoefficients) -> Result<()> {
        self.check_cols(c.channel_count())?;
        for (k, channel) in c.channels_mut().iter_mut().enumerate() {
            let len = channel.len();
            for (n, v) in channel.iter_mut().enumerate() {
                *v *= self.gain(self.row_for(n, len), k);
            }
        }
        Ok(())
    }
}

/// Coefficient layouts a [`Mask`] can be applied to in place.
pub trait Maskable {
    fn apply_mask(&mut self, mask: &Mask) -> Result<()>;
}

impl Maskable for RaggedCoefficients {
    /// Channels shorter or longer than the mask's time axis pick the
    /// nearest mask row.
    fn apply_mask(&mut self, mask: &Mask) -> Result<()> {
        mask.apply_ragged(self)
    }
}

impl Maskable for RasterCoefficients {
    /// The grid must match exactly.
    fn apply_mask(&mut self, mask: &Mask) -> Result<()> {
        mask.check_cols(self.channel_count())?;
        if mask.rows != self.time_len() {
            return Err(Error::ShapeMismatch(format!(
                "mask has {} time steps, raster {}",
                mask.rows,
                self.time_len()
            )));
        }
        for k in 0..self.channel_count() {
            for (t, v) in self.channel_mut(k).iter_mut().enumerate() {
                *v *= mask.gain(t, k);
            }
        }
        Ok(())
    }
}

impl Maskable for SlicedCoefficients {
    /// Both layers are masked on the global time axis.
    fn apply_mask(&mut self, mask: &Mask) -> Result<()> {
        mask.apply_ragged(self.layer_mut(0))?;
        mask.apply_ragged(self.layer_mut(1))
    }
}

/// Masked copy of `c`.
pub fn apply_mask<T: Maskable + Clone>(c: &T, mask: &Mask) -> Result<T> {
    let mut out = c.clone();
    out.apply_mask(mask)?;
    Ok(out)
}
