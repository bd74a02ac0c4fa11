//! Coefficient-domain processing: masking, rasterization and transposition.

mod mask;
mod raster;
mod transpose;

pub use mask::{apply_mask, mask_gain, Mask, MaskScaling, Maskable};
pub use raster::{derasterize, derasterize_to, rasterize, rasterize_to, RasterCoefficients};
pub use transpose::{
    demodulate, remodulate, transpose_bins, transpose_coefficients, transpose_sliced, Transposition,
};
