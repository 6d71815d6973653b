//! The five-parameter ellipse record and its geometry helpers.

use serde::{Deserialize, Serialize};

/// A detected (or ground-truth) ellipse.
///
/// `alpha` is the orientation of the major axis in radians, normalized to
/// `[0, pi)`. `quality` is the number of edge points found on the contour,
/// zero for ellipses that did not come out of the detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ellipse {
    pub x0: f64,
    pub y0: f64,
    /// Half major axis, pixels.
    pub a: f64,
    /// Half minor axis, pixels.
    pub b: f64,
    /// Orientation in radians, `[0, pi)`.
    pub alpha: f64,
    #[serde(default)]
    pub quality: u32,
}

impl Ellipse {
    pub fn new(x0: f64, y0: f64, a: f64, b: f64, alpha: f64) -> Self {
        Ellipse {
            x0,
            y0,
            a,
            b,
            alpha: normalize_orientation(alpha),
            quality: 0,
        }
    }

    /// Maps a point into the ellipse's own frame (major axis along +x).
    pub fn to_local(&self, x: f64, y: f64) -> (f64, f64) {
        let (sin_a, cos_a) = self.alpha.sin_cos();
        let dx = x - self.x0;
        let dy = y - self.y0;
        (dx * cos_a + dy * sin_a, -dx * sin_a + dy * cos_a)
    }

    /// Maps a local-frame point back to image coordinates.
    pub fn to_image(&self, lx: f64, ly: f64) -> (f64, f64) {
        let (sin_a, cos_a) = self.alpha.sin_cos();
        (
            self.x0 + lx * cos_a - ly * sin_a,
            self.y0 + lx * sin_a + ly * cos_a,
        )
    }

    /// Point on the contour at parametric angle `t`.
    pub fn point_at(&self, t: f64) -> (f64, f64) {
        self.to_image(self.a * t.cos(), self.b * t.sin())
    }

    /// Normalized implicit value `(x'/a)^2 + (y'/b)^2 - 1`; zero on the contour.
    pub fn implicit_value(&self, x: f64, y: f64) -> f64 {
        let (lx, ly) = self.to_local(x, y);
        (lx / self.a).powi(2) + (ly / self.b).powi(2) - 1.0
    }

    /// Contour band membership: `|Q| <= tolerance/min(a, b)`.
    ///
    /// First-order bound turning an implicit-value threshold into a band
    /// around the contour: `|grad Q|` reaches `2/min(a, b)` where the
    /// contour curves fastest, so the accepted band is about `tolerance`
    /// pixels thick in total there (half on each side), and somewhat
    /// thicker near the vertices of eccentric ellipses.
    pub fn in_band(&self, x: f64, y: f64, tolerance: f64) -> bool {
        self.implicit_value(x, y).abs() <= self.band_epsilon(tolerance)
    }

    pub fn band_epsilon(&self, tolerance: f64) -> f64 {
        tolerance / self.a.min(self.b)
    }

    /// Ramanujan's perimeter approximation.
    pub fn perimeter(&self) -> f64 {
        let (a, b) = (self.a, self.b);
        std::f64::consts::PI * (3.0 * (a + b) - ((3.0 * a + b) * (a + 3.0 * b)).sqrt())
    }

    /// The clustering feature vector `(x0, y0, a, b, alpha)`.
    pub fn feature(&self) -> [f64; 5] {
        [self.x0, self.y0, self.a, self.b, self.alpha]
    }
}

/// Folds an angle into `[0, pi)`; ellipse orientation has period pi.
pub fn normalize_orientation(alpha: f64) -> f64 {
    let a = alpha.rem_euclid(std::f64::consts::PI);
    if a >= std::f64::consts::PI {
        0.0
    } else {
        a
    }
}

/// Orientation difference mod pi, in `[0, pi/2]`.
pub fn orientation_difference(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::PI);
    d.min(std::f64::consts::PI - d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn normalization_folds_into_half_turn() {
        assert_eq!(normalize_orientation(0.0), 0.0);
        assert!((normalize_orientation(PI + 0.3) - 0.3).abs() < 1e-12);
        assert!((normalize_orientation(-0.3) - (PI - 0.3)).abs() < 1e-12);
        assert!(normalize_orientation(PI) < 1e-12);
    }

    #[test]
    fn implicit_value_zero_on_contour() {
        let e = Ellipse::new(10.0, 20.0, 5.0, 3.0, 0.7);
        for i in 0..16 {
            let t = i as f64 * PI / 8.0;
            let (x, y) = e.point_at(t);
            assert!(e.implicit_value(x, y).abs() < 1e-12);
        }
    }

    #[test]
    fn orientation_difference_wraps() {
        assert!((orientation_difference(0.05, PI - 0.05) - 0.1).abs() < 1e-12);
        assert!((orientation_difference(1.0, 1.4) - 0.4).abs() < 1e-12);
    }
}
