//! File formats, whole-file pipelines and experiments around `slicq-core`.

pub mod bench;
pub mod config;
pub mod container;
pub mod error;
pub mod images;
pub mod pipeline;
pub mod wav;

pub use error::{CliError, Result};
