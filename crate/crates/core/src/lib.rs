//! Ellipse detection in raster images via a Randomized Hough Transform
//! with result clustering.
//!
//! The pipeline: grayscale input -> Gaussian denoise -> Sobel gradient ->
//! maximum-variance threshold -> edge map -> randomized vertex-pair
//! sampling with a quantized 1-D minor-axis accumulator -> false-ellipse
//! filtering -> single-pass clustering -> per-cluster representatives.
//!
//! The `parallel` feature (default on) evaluates sampled pairs with
//! rayon; results are identical to the sequential fallback.

pub mod cluster;
pub mod detector;
pub mod ellipse;
pub mod error;
pub mod pipeline;
pub mod preprocess;
pub mod raster_io;
pub mod synth;

pub use ellipse::Ellipse;
pub use error::{Error, Result};
