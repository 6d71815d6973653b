//! Synthetic ground-truth scenes: generation, rasterization and grading.
//!
//! These stand in for real captures in the end-to-end tests, so detection
//! quality is always judged against known parameters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ellipse::{orientation_difference, Ellipse};
use crate::error::{Error, Result};
use crate::raster_io::EdgeMap;

/// A ground-truth scene: frame, ellipses, clutter and contour thickness.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SceneSpec {
    pub width: u32,
    pub height: u32,
    pub ellipses: Vec<Ellipse>,
    pub clutter_points: u32,
    pub contour_thickness: f64,
    pub rng_seed: u64,
}

impl SceneSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(format!("scene spec: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene spec serialization")
    }
}

/// Marks every pixel inside each ellipse's contour band (the same
/// implicit-form predicate the detector's side filter uses), then adds
/// `clutter_points` uniform noise pixels, re-drawing collisions.
pub fn rasterize(spec: &SceneSpec) -> EdgeMap {
    let mut map = EdgeMap::new(spec.width, spec.height);
    for e in &spec.ellipses {
        mark_band(&mut map, e, spec.contour_thickness);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let mut placed = 0;
    while placed < spec.clutter_points {
        let x = rng.gen_range(0..spec.width);
        let y = rng.gen_range(0..spec.height);
        if !map.contains(x, y) {
            map.set(x, y);
            placed += 1;
        }
    }
    map
}

fn band_extent(e: &Ellipse, thickness: f64) -> f64 {
    // band is thickest near the vertices, ~thickness * a/b
    e.a + thickness * e.a / e.b + 2.0
}

fn mark_band(map: &mut EdgeMap, e: &Ellipse, thickness: f64) {
    let ext = band_extent(e, thickness);
    let x_lo = ((e.x0 - ext).floor().max(0.0)) as u32;
    let y_lo = ((e.y0 - ext).floor().max(0.0)) as u32;
    let x_hi = ((e.x0 + ext).ceil() as u32).min(map.width().saturating_sub(1));
    let y_hi = ((e.y0 + ext).ceil() as u32).min(map.height().saturating_sub(1));
    for y in y_lo..=y_hi {
        for x in x_lo..=x_hi {
            if e.in_band(x as f64, y as f64, thickness) {
                map.set(x, y);
            }
        }
    }
}

/// Number of band pixels an ellipse would contribute on an open frame.
pub fn contour_pixel_count(e: &Ellipse, thickness: f64) -> usize {
    let ext = band_extent(e, thickness).ceil() as i64;
    let (cx, cy) = (e.x0.round() as i64, e.y0.round() as i64);
    let mut count = 0;
    for y in cy - ext..=cy + ext {
        for x in cx - ext..=cx + ext {
            if e.in_band(x as f64, y as f64, thickness) {
                count += 1;
            }
        }
    }
    count
}

/// Parameter tolerances for matching a detection to a truth ellipse.
#[derive(Debug, Clone, Copy)]
pub struct GradeTolerance {
    /// Per-component center tolerance, pixels.
    pub center: f64,
    /// Tolerance on each half axis, pixels.
    pub axes: f64,
    /// Orientation tolerance, radians, compared mod pi.
    pub alpha: f64,
}

/// Absolute parameter errors of one matched detection.
#[derive(Debug, Clone, Copy)]
pub struct ParamError {
    pub center: f64,
    pub major: f64,
    pub minor: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone)]
pub struct GradeReport {
    pub matched: usize,
    pub false_positives: usize,
    pub errors: Vec<ParamError>,
}

fn within(detected: &Ellipse, truth: &Ellipse, tol: &GradeTolerance) -> bool {
    (detected.x0 - truth.x0).abs() <= tol.center
        && (detected.y0 - truth.y0).abs() <= tol.center
        && (detected.a - truth.a).abs() <= tol.axes
        && (detected.b - truth.b).abs() <= tol.axes
        && orientation_difference(detected.alpha, truth.alpha) <= tol.alpha
}

/// Greedy one-to-one matching of detections against ground truth.
/// Detections that match no remaining truth ellipse are false positives.
pub fn grade(detected: &[Ellipse], truth: &[Ellipse], tol: &GradeTolerance) -> GradeReport {
    let mut taken = vec![false; truth.len()];
    let mut report = GradeReport {
        matched: 0,
        false_positives: 0,
        errors: Vec::new(),
    };
    for d in detected {
        let best = truth
            .iter()
            .enumerate()
            .filter(|(i, t)| !taken[*i] && within(d, t, tol))
            .min_by(|(_, ta), (_, tb)| {
                let fa = crate::cluster::distance(&d.into(), &(*ta).into());
                let fb = crate::cluster::distance(&d.into(), &(*tb).into());
                fa.total_cmp(&fb)
            });
        match best {
            Some((i, t)) => {
                taken[i] = true;
                report.matched += 1;
                report.errors.push(ParamError {
                    center: ((d.x0 - t.x0).powi(2) + (d.y0 - t.y0).powi(2)).sqrt(),
                    major: (d.a - t.a).abs(),
                    minor: (d.b - t.b).abs(),
                    alpha: orientation_difference(d.alpha, t.alpha),
                });
            }
            None => report.false_positives += 1,
        }
    }
    report
}

/// Knobs for the random scene generator.
#[derive(Debug, Clone, Copy)]
pub struct SceneParams {
    pub width: u32,
    pub height: u32,
    pub ellipse_count: (u32, u32),
    pub a_range: (f64, f64),
    pub b_min: f64,
    pub contour_thickness: f64,
    pub clutter_points: u32,
}

impl Default for SceneParams {
    fn default() -> Self {
        SceneParams {
            width: 320,
            height: 240,
            ellipse_count: (1, 3),
            a_range: (15.0, 70.0),
            b_min: 8.0,
            contour_thickness: 2.0,
            clutter_points: 150,
        }
    }
}

/// Draws a random scene of non-intersecting, fully in-frame ellipses.
/// Deterministic in `seed`.
pub fn random_scene(params: &SceneParams, seed: u64) -> SceneSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = rng.gen_range(params.ellipse_count.0..=params.ellipse_count.1);
    let mut ellipses: Vec<Ellipse> = Vec::new();
    let mut attempts = 0;
    while (ellipses.len() as u32) < count && attempts < 10_000 {
        attempts += 1;
        let a = rng.gen_range(params.a_range.0..params.a_range.1);
        let b = rng.gen_range(params.b_min..a.max(params.b_min + 0.1));
        let alpha = rng.gen_range(0.0..std::f64::consts::PI);
        let candidate = Ellipse::new(0.0, 0.0, a, b, alpha);
        let margin = band_extent(&candidate, params.contour_thickness) + 2.0;
        if 2.0 * margin >= params.width.min(params.height) as f64 {
            continue;
        }
        let x0 = rng.gen_range(margin..params.width as f64 - margin);
        let y0 = rng.gen_range(margin..params.height as f64 - margin);
        let candidate = Ellipse::new(x0, y0, a, b, alpha);
        let separated = ellipses.iter().all(|e| {
            let dist = ((e.x0 - x0).powi(2) + (e.y0 - y0).powi(2)).sqrt();
            dist > band_extent(e, params.contour_thickness)
                + band_extent(&candidate, params.contour_thickness)
                + 4.0
        });
        if !separated {
            continue;
        }
        ellipses.push(candidate);
    }
    SceneSpec {
        width: params.width,
        height: params.height,
        ellipses,
        clutter_points: params.clutter_points,
        contour_thickness: params.contour_thickness,
        rng_seed: seed ^ 0x9e3779b97f4a7c15,
    }
}
