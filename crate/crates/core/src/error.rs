//! Error type shared by the whole pipeline.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed image header or payload.
    #[error("format error: {0}")]
    Format(String),
    /// Payload shorter than the header promises.
    #[error("truncated payload: {0}")]
    Truncated(String),
    /// Well-formed but outside the supported subset (e.g. maxval != 255).
    #[error("unsupported input: {0}")]
    Unsupported(String),
    /// Raster smaller than the operator's kernel footprint.
    #[error("raster too small: {width}x{height}, need at least {min}x{min}")]
    TooSmall { width: u32, height: u32, min: u32 },
    /// Histogram with no mass; no threshold can be derived.
    #[error("empty histogram")]
    EmptyHistogram,
    /// Edge map with no foreground pixels; the detector has nothing to sample.
    #[error("edge map has no foreground points")]
    NoEdges,
    /// Configuration value outside its documented range.
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
