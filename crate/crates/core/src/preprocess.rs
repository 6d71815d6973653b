//! Front end of the pipeline: Gaussian denoise, Sobel gradient,
//! maximum-variance (Otsu) thresholding and binarization.
//!
//! All border handling is coordinate clamping, so outputs keep the input
//! dimensions and tests can assert exact values.

use crate::error::{Error, Result};
use crate::raster_io::{EdgeMap, GrayRaster};

/// Row-major non-negative gradient magnitudes (`|Gx| + |Gy|`, max 2040).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradientRaster {
    width: u32,
    height: u32,
    magnitudes: Vec<u16>,
}

impl GradientRaster {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn magnitudes(&self) -> &[u16] {
        &self.magnitudes
    }

    /// Magnitudes rescaled linearly onto [0, 255].
    ///
    /// An all-zero gradient stays all zero.
    pub fn rescaled(&self) -> Vec<u8> {
        let max = *self.magnitudes.iter().max().unwrap_or(&0);
        if max == 0 {
            return vec![0; self.magnitudes.len()];
        }
        let max = max as u32;
        self.magnitudes
            .iter()
            .map(|&m| ((m as u32 * 255 + max / 2) / max) as u8)
            .collect()
    }

    /// 256-bin histogram of the rescaled magnitudes.
    pub fn histogram(&self) -> [u64; 256] {
        let mut hist = [0u64; 256];
        for v in self.rescaled() {
            hist[v as usize] += 1;
        }
        hist
    }
}

/// Global binarization level on the [0, 255] scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Threshold {
    pub value: u8,
}

/// 3x3 Gaussian smoothing with kernel [1 2 1; 2 4 2; 1 2 1]/16.
pub fn denoise(input: &GrayRaster) -> GrayRaster {
    const KERNEL: [[i64; 3]; 3] = [[1, 2, 1], [2, 4, 2], [1, 2, 1]];
    let (w, h) = (input.width(), input.height());
    let rows = process_rows(h, |y| {
        let mut row = Vec::with_capacity(w as usize);
        for x in 0..w {
            let mut acc = 0i64;
            for (ky, krow) in KERNEL.iter().enumerate() {
                for (kx, &k) in krow.iter().enumerate() {
                    let sx = x as i64 + kx as i64 - 1;
                    let sy = y as i64 + ky as i64 - 1;
                    acc += k * input.get_clamped(sx, sy) as i64;
                }
            }
            row.push(((acc + 8) / 16) as u8);
        }
        row
    });
    GrayRaster::new(w, h, rows.concat())
}

/// Sobel gradient with `|Gx| + |Gy|` magnitude.
pub fn gradient(input: &GrayRaster) -> Result<GradientRaster> {
    let (w, h) = (input.width(), input.height());
    if w < 3 || h < 3 {
        return Err(Error::TooSmall {
            width: w,
            height: h,
            min: 3,
        });
    }
    const SOBEL_X: [[i64; 3]; 3] = [[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]];
    const SOBEL_Y: [[i64; 3]; 3] = [[-1, -2, -1], [0, 0, 0], [1, 2, 1]];
    let rows = process_rows(h, |y| {
        let mut row = Vec::with_capacity(w as usize);
        for x in 0..w {
            let mut gx = 0i64;
            let mut gy = 0i64;
            for ky in 0..3 {
                for kx in 0..3 {
                    let s = input.get_clamped(x as i64 + kx as i64 - 1, y as i64 + ky as i64 - 1)
                        as i64;
                    gx += SOBEL_X[ky][kx] * s;
                    gy += SOBEL_Y[ky][kx] * s;
                }
            }
            row.push((gx.abs() + gy.abs()) as u16);
        }
        row
    });
    Ok(GradientRaster {
        width: w,
        height: h,
        magnitudes: rows.concat(),
    })
}

#[cfg(feature = "parallel")]
fn process_rows<T: Send>(height: u32, f: impl Fn(u32) -> Vec<T> + Send + Sync) -> Vec<Vec<T>> {
    use rayon::prelude::*;
    (0..height).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn process_rows<T>(height: u32, f: impl Fn(u32) -> Vec<T>) -> Vec<Vec<T>> {
    (0..height).map(f).collect()
}

/// Threshold maximizing the between-class variance `w0*w1*(mu0 - mu1)^2`
/// over splits `{<= t, > t}`; ties resolve to the smallest `t`.
pub fn max_variance_threshold(histogram: &[u64; 256]) -> Result<Threshold> {
    let total: u64 = histogram.iter().sum();
    if total == 0 {
        return Err(Error::EmptyHistogram);
    }
    let total_f = total as f64;
    let sum_all: f64 = histogram
        .iter()
        .enumerate()
        .map(|(i, &c)| i as f64 * c as f64)
        .sum();

    let mut best_t = 0u8;
    let mut best_var = f64::NEG_INFINITY;
    let mut w0 = 0.0f64;
    let mut sum0 = 0.0f64;
    for (t, &count) in histogram.iter().enumerate() {
        w0 += count as f64;
        sum0 += t as f64 * count as f64;
        let w1 = total_f - w0;
        let var = if w0 > 0.0 && w1 > 0.0 {
            let mu0 = sum0 / w0;
            let mu1 = (sum_all - sum0) / w1;
            w0 / total_f * (w1 / total_f) * (mu0 - mu1) * (mu0 - mu1)
        } else {
            0.0
        };
        if var > best_var {
            best_var = var;
            best_t = t as u8;
        }
    }
    Ok(Threshold { value: best_t })
}

/// Foreground = rescaled magnitude strictly above the threshold.
pub fn binarize(gradient: &GradientRaster, threshold: Threshold) -> EdgeMap {
    let mut map = EdgeMap::new(gradient.width(), gradient.height());
    let scaled = gradient.rescaled();
    for y in 0..gradient.height() {
        for x in 0..gradient.width() {
            if scaled[(y * gradient.width() + x) as usize] > threshold.value {
                map.set(x, y);
            }
        }
    }
    map
}

/// Full front end: denoise -> gradient -> threshold -> binarize.
pub fn edges_from_gray(input: &GrayRaster) -> Result<EdgeMap> {
    let smoothed = denoise(input);
    let grad = gradient(&smoothed)?;
    let threshold = max_variance_threshold(&grad.histogram())?;
    Ok(binarize(&grad, threshold))
}
