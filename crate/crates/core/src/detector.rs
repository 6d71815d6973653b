//! Randomized Hough Transform ellipse detector.
//!
//! Samples random vertex pairs from the edge map, recovers center, half
//! major axis and orientation from the pair, then lets every other edge
//! point vote for the half minor axis in a quantized 1-D accumulator.
//! Candidates surviving the quality and side-balance filters are the
//! "virtual" ellipses handed to the clustering stage.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ellipse::{normalize_orientation, Ellipse};
use crate::error::{Error, Result};
use crate::raster_io::EdgeMap;

/// Two edge points hypothesized to be the endpoints of a major axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexPair {
    pub p1: (f64, f64),
    pub p2: (f64, f64),
}

/// Quantized vote histogram over candidate half-minor-axis lengths.
#[derive(Debug, Clone)]
pub struct MinorAxisAccumulator {
    bins: Vec<u32>,
    bin_width: f64,
}

impl MinorAxisAccumulator {
    /// Accumulator covering `(0, max_value]`.
    pub fn new(max_value: f64, bin_width: f64) -> Self {
        assert!(bin_width > 0.0 && max_value > 0.0);
        let bins = (max_value / bin_width).floor() as usize + 1;
        MinorAxisAccumulator {
            bins: vec![0; bins],
            bin_width,
        }
    }

    pub fn vote(&mut self, value: f64) {
        let idx = (value / self.bin_width).floor() as usize;
        if idx < self.bins.len() {
            self.bins[idx] += 1;
        }
    }

    pub fn total_votes(&self) -> u64 {
        self.bins.iter().map(|&v| v as u64).sum()
    }

    /// Peak bin as (bin center value, votes); ties resolve to the smallest
    /// bin. None when no votes were cast.
    pub fn peak(&self) -> Option<(f64, u32)> {
        let (idx, &votes) = self
            .bins
            .iter()
            .enumerate()
            .max_by(|(ia, va), (ib, vb)| va.cmp(vb).then(ib.cmp(ia)))?;
        if votes == 0 {
            return None;
        }
        Some(((idx as f64 + 0.5) * self.bin_width, votes))
    }
}

/// Detector knobs. Defaults follow the reference experiment settings
/// (pair budget factor 2, quality 200) with geometry bounds sized for
/// desk-scale images.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionConfig {
    /// Pair budget factor: m = c_factor * n draws.
    pub c_factor: u32,
    pub a_min: f64,
    pub a_max: f64,
    pub b_min: f64,
    /// Minimum accumulator peak votes for a candidate to survive.
    pub quality_threshold: u32,
    /// Minimum ratio between the smaller and larger per-side contour counts.
    pub side_balance_min: f64,
    /// Contour band half-thickness used by the side filter, pixels.
    pub contour_tolerance: f64,
    pub accumulator_bin_width: f64,
    pub rng_seed: u64,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        DetectionConfig {
            c_factor: 2,
            a_min: 10.0,
            a_max: 100.0,
            b_min: 5.0,
            quality_threshold: 200,
            side_balance_min: 0.35,
            contour_tolerance: 1.5,
            accumulator_bin_width: 2.0,
            rng_seed: 0,
        }
    }
}

impl DetectionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.c_factor < 1 {
            return Err(Error::Config("c_factor must be >= 1".into()));
        }
        if !(self.a_min > 0.0 && self.a_min <= self.a_max) {
            return Err(Error::Config("need 0 < a_min <= a_max".into()));
        }
        if self.b_min <= 0.0 {
            return Err(Error::Config("b_min must be positive".into()));
        }
        if self.quality_threshold < 1 {
            return Err(Error::Config("quality_threshold must be >= 1".into()));
        }
        if !(self.side_balance_min > 0.0 && self.side_balance_min <= 1.0) {
            return Err(Error::Config("side_balance_min must be in (0, 1]".into()));
        }
        if self.contour_tolerance <= 0.0 {
            return Err(Error::Config("contour_tolerance must be positive".into()));
        }
        if self.accumulator_bin_width <= 0.0 {
            return Err(Error::Config(
                "accumulator_bin_width must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Per-run counters in the shape of the reported statistics table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub virtual_ellipses: u64,
    pub real_ellipses: u64,
    /// The configured quality threshold, echoed for the report.
    pub ellipse_quality: u32,
    /// Sampled pair budget m = c_factor * total_edge_points.
    pub search_point_pairs: u64,
    pub total_edge_points: u64,
}

/// Draws the full m = C*n pair budget; degenerate draws (identical
/// endpoints, distance outside `[2*a_min, 2*a_max]`) are discarded but
/// still consume budget, so the returned list may be shorter than m.
pub fn sample_pairs(
    edges: &EdgeMap,
    config: &DetectionConfig,
    rng: &mut impl Rng,
) -> Result<Vec<VertexPair>> {
    let points = edges.points();
    let n = points.len();
    if n == 0 {
        return Err(Error::NoEdges);
    }
    let budget = config.c_factor as u64 * n as u64;
    let min_d2 = (2.0 * config.a_min).powi(2);
    let max_d2 = (2.0 * config.a_max).powi(2);
    let mut pairs = Vec::new();
    for _ in 0..budget {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            continue;
        }
        let p1 = (points[i].0 as f64, points[i].1 as f64);
        let p2 = (points[j].0 as f64, points[j].1 as f64);
        let d2 = (p2.0 - p1.0).powi(2) + (p2.1 - p1.1).powi(2);
        if d2 < min_d2 || d2 > max_d2 {
            continue;
        }
        pairs.push(VertexPair { p1, p2 });
    }
    Ok(pairs)
}

/// Center, half major axis and orientation from a vertex pair.
pub fn params_from_vertices(pair: &VertexPair) -> (f64, f64, f64, f64) {
    let (x1, y1) = pair.p1;
    let (x2, y2) = pair.p2;
    let x0 = (x1 + x2) / 2.0;
    let y0 = (y1 + y2) / 2.0;
    let a = ((x2 - x1).powi(2) + (y2 - y1).powi(2)).sqrt() / 2.0;
    let alpha = normalize_orientation((y2 - y1).atan2(x2 - x1));
    (x0, y0, a, alpha)
}

/// Half-minor-axis hypothesis from one third point.
///
/// With d the third point's distance to the center, f its distance to a
/// vertex and `cos t = (a^2 + d^2 - f^2) / (2 a d)`, the candidate is
/// `b = sqrt(a^2 d^2 sin^2 t / (a^2 - d^2 cos^2 t))`. Returns None when
/// the third point is geometrically inconsistent with the pair (d = 0,
/// d >= a, |cos t| > 1 or a non-positive denominator).
pub fn vote_minor_axis(
    center: (f64, f64),
    a: f64,
    third: (f64, f64),
    vertex: (f64, f64),
) -> Option<f64> {
    let d2 = (third.0 - center.0).powi(2) + (third.1 - center.1).powi(2);
    let d = d2.sqrt();
    // d == a is legal (every circle point); only farther-out points are
    // inconsistent with the pair
    if d <= 0.0 || d > a {
        return None;
    }
    let f2 = (third.0 - vertex.0).powi(2) + (third.1 - vertex.1).powi(2);
    let cos_t = (a * a + d2 - f2) / (2.0 * a * d);
    if cos_t.abs() > 1.0 {
        return None;
    }
    let sin2_t = 1.0 - cos_t * cos_t;
    let denom = a * a - d2 * cos_t * cos_t;
    if denom <= 0.0 {
        return None;
    }
    Some((a * a * d2 * sin2_t / denom).sqrt())
}

/// Runs the accumulator for one pair. The edge set is read-only; contour
/// points are never consumed by a detection.
///
pub fn detect_candidate(
    pair: &VertexPair,
    edges: &EdgeMap,
    config: &DetectionConfig,
) -> Option<Ellipse> {
    let (x0, y0, a, alpha) = params_from_vertices(pair);
    if a < config.a_min || a > config.a_max {
        return None;
    }
    let mut accumulator = MinorAxisAccumulator::new(a, config.accumulator_bin_width);
    for &(px, py) in edges.points() {
        let p = (px as f64, py as f64);
        if p == pair.p1 || p == pair.p2 {
            continue;
        }
        if let Some(b) = vote_minor_axis((x0, y0), a, p, pair.p1) {
            if b > 0.0 && b <= a {
                accumulator.vote(b);
            }
        }
    }
    let (b, votes) = accumulator.peak()?;
    if votes < config.quality_threshold || b < config.b_min || b > a {
        return None;
    }
    let mut e = Ellipse::new(x0, y0, a, b, alpha);
    e.quality = votes;
    Some(e)
}

/// Edge points within the contour band, split by the side of the major
/// axis they fall on (points exactly on the axis line count for neither).
pub fn contour_census(candidate: &Ellipse, edges: &EdgeMap, tolerance: f64) -> (u64, u64) {
    let mut above = 0u64;
    let mut below = 0u64;
    let eps = candidate.band_epsilon(tolerance);
    for &(px, py) in edges.points() {
        let (lx, ly) = candidate.to_local(px as f64, py as f64);
        let q = (lx / candidate.a).powi(2) + (ly / candidate.b).powi(2) - 1.0;
        if q.abs() > eps {
            continue;
        }
        if ly > 0.0 {
            above += 1;
        } else if ly < 0.0 {
            below += 1;
        }
    }
    (above, below)
}

/// Side-balance filter: contour points must exist on both sides of the
/// major axis and in roughly proportional counts.
pub fn filter_candidate(candidate: &Ellipse, edges: &EdgeMap, config: &DetectionConfig) -> bool {
    let (above, below) = contour_census(candidate, edges, config.contour_tolerance);
    if above == 0 || below == 0 {
        return false;
    }
    let (lo, hi) = (above.min(below), above.max(below));
    lo as f64 / hi as f64 >= config.side_balance_min
}

fn evaluate_pair(pair: &VertexPair, edges: &EdgeMap, config: &DetectionConfig) -> Option<Ellipse> {
    detect_candidate(pair, edges, config).filter(|e| filter_candidate(e, edges, config))
}

/// Full detection pass; output order follows the sampled-pair order, so
/// results are identical for the parallel and sequential paths.
pub fn detect_all(edges: &EdgeMap, config: &DetectionConfig) -> Result<(Vec<Ellipse>, RunStats)> {
    run_detection(edges, config, cfg!(feature = "parallel"))
}

/// Sequential variant, kept public for benchmarking against the default
/// data-parallel path.
pub fn detect_all_sequential(
    edges: &EdgeMap,
    config: &DetectionConfig,
) -> Result<(Vec<Ellipse>, RunStats)> {
    run_detection(edges, config, false)
}

fn run_detection(
    edges: &EdgeMap,
    config: &DetectionConfig,
    parallel: bool,
) -> Result<(Vec<Ellipse>, RunStats)> {
    config.validate()?;
    let n = edges.len() as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let pairs = sample_pairs(edges, config, &mut rng)?;

    let candidates: Vec<Option<Ellipse>> = if parallel {
        evaluate_pairs_parallel(&pairs, edges, config)
    } else {
        pairs
            .iter()
            .map(|p| evaluate_pair(p, edges, config))
            .collect()
    };
    let ellipses: Vec<Ellipse> = candidates.into_iter().flatten().collect();

    let stats = RunStats {
        virtual_ellipses: ellipses.len() as u64,
        real_ellipses: 0,
        ellipse_quality: config.quality_threshold,
        search_point_pairs: config.c_factor as u64 * n,
        total_edge_points: n,
    };
    Ok((ellipses, stats))
}

#[cfg(feature = "parallel")]
fn evaluate_pairs_parallel(
    pairs: &[VertexPair],
    edges: &EdgeMap,
    config: &DetectionConfig,
) -> Vec<Option<Ellipse>> {
    use rayon::prelude::*;
    pairs
        .par_iter()
        .map(|p| evaluate_pair(p, edges, config))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn evaluate_pairs_parallel(
    pairs: &[VertexPair],
    edges: &EdgeMap,
    config: &DetectionConfig,
) -> Vec<Option<Ellipse>> {
    pairs
        .iter()
        .map(|p| evaluate_pair(p, edges, config))
        .collect()
}
