use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments, parameters or input that can never succeed.
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] slicq_core::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("wav: {0}")]
    Wav(#[from] hound::Error),
    #[error("image: {0}")]
    Image(#[from] image::ImageError),
    #[error("malformed coefficient file: {0}")]
    Format(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for usage errors, 1 for everything that went wrong at run time.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(slicq_core::Error::InvalidParams(_)) => 2,
            _ => 1,
        }
    }
}
