//! Spectrogram images and mask files in the portable anymap formats.
//!
//! Both put the highest frequency channel in the top row and time along
//! the columns.

use std::path::Path;

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, ImageEncoder};
use slicq_core::processing::{Mask, MaskScaling};

use crate::error::{CliError, Result};

/// Nearest coefficient of a channel of `len` entries for column `x` of `width`.
fn nearest(x: usize, width: usize, len: usize) -> usize {
    ((2 * x + 1) * len) / (2 * width)
}

/// 8-bit levels for channels `0..=bands+1` (DC to Nyquist), top row highest.
/// Power is shown in dB relative to its maximum, clipped at `-range_db`.
pub fn spectrogram_levels(
    power: &[Vec<f64>],
    bands: usize,
    width: usize,
    range_db: f64,
) -> (usize, Vec<u8>) {
    let shown = &power[..=bands + 1];
    let peak = shown.iter().flatten().copied().fold(0.0, f64::max);
    let height = shown.len();
    let mut levels = vec![0u8; width * height];
    if peak > 0.0 {
        for (row, channel) in shown.iter().rev().enumerate() {
            for x in 0..width {
                let p = channel[nearest(x, width, channel.len())];
                let db = if p > 0.0 {
                    10.0 * (p / peak).log10()
                } else {
                    -range_db
                };
                let t = ((db + range_db) / range_db).clamp(0.0, 1.0);
                levels[row * width + x] = (t * 255.0).round() as u8;
            }
        }
    }
    (height, levels)
}

/// Dark blue through red to yellow.
fn colormap(level: u8) -> [u8; 3] {
    let t = level as f64 / 255.0;
    let r = (1.5 * t).min(1.0);
    let g = (2.0 * t - 1.0).clamp(0.0, 1.0);
    let b = (0.5 - (t - 0.25).abs() * 2.0).max(0.0) + if t < 0.25 { 0.3 } else { 0.0 };
    [
        (r * 255.0) as u8,
        (g * 255.0) as u8,
        (b.min(1.0) * 255.0) as u8,
    ]
}

/// Writes a graymap, or a color pixmap when `color` is set.
pub fn write_spectrogram(
    path: &Path,
    width: usize,
    height: usize,
    levels: &[u8],
    color: bool,
) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    let out = std::io::BufWriter::new(file);
    if color {
        let rgb: Vec<u8> = levels.iter().flat_map(|&l| colormap(l)).collect();
        PnmEncoder::new(out)
            .with_subtype(PnmSubtype::Pixmap(SampleEncoding::Binary))
            .write_image(&rgb, width as u32, height as u32, ExtendedColorType::Rgb8)?;
    } else {
        PnmEncoder::new(out)
            .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
            .write_image(levels, width as u32, height as u32, ExtendedColorType::L8)?;
    }
    Ok(())
}

/// Reads a graymap mask. Its height is either `bands + 2` (DC to Nyquist,
/// mirrored channels copy their partner) or `2 * bands + 2` (every channel).
pub fn read_mask(path: &Path, bands: usize, scaling: MaskScaling) -> Result<Mask> {
    let img = image::open(path)?.into_luma16();
    let (width, height) = (img.width() as usize, img.height() as usize);
    let channels = 2 * bands + 2;
    let row_of = |k: usize| -> Option<usize> {
        if height == channels {
            Some(channels - 1 - k)
        } else if height == bands + 2 {
            let k = if k > bands + 1 { channels - k } else { k };
            Some(bands + 1 - k)
        } else {
            None
        }
    };
    if row_of(0).is_none() || width == 0 {
        return Err(CliError::Usage(format!(
            "{}: mask must be {} or {} rows high, found {width} x {height}",
            path.display(),
            bands + 2,
            channels
        )));
    }
    let mut values = vec![0.0; width * channels];
    for t in 0..width {
        for k in 0..channels {
            let row = row_of(k).unwrap();
            values[t * channels + k] =
                img.get_pixel(t as u32, row as u32)[0] as f64 / u16::MAX as f64;
        }
    }
    Ok(Mask::new(width, channels, values, scaling)?)
}
