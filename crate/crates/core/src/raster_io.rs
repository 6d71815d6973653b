//! Image and result file I/O.
//!
//! Supports portable graymaps (ASCII `P2` and binary `P5`) and binary
//! portable pixmaps (`P6`, converted to gray by channel mean), all with
//! maxval 255. Results are emitted as CSV and as a JSON report.

use serde::Serialize;

use crate::detector::RunStats;
use crate::ellipse::Ellipse;
use crate::error::{Error, Result};

/// Row-major 8-bit grayscale raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayRaster {
    width: u32,
    height: u32,
    samples: Vec<u8>,
}

impl GrayRaster {
    pub fn new(width: u32, height: u32, samples: Vec<u8>) -> Self {
        assert!(width >= 1 && height >= 1, "raster dimensions must be >= 1");
        assert_eq!(samples.len(), (width * height) as usize);
        GrayRaster {
            width,
            height,
            samples,
        }
    }

    pub fn filled(width: u32, height: u32, value: u8) -> Self {
        Self::new(width, height, vec![value; (width * height) as usize])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.samples[(y * self.width + x) as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, v: u8) {
        self.samples[(y * self.width + x) as usize] = v;
    }

    /// Sample with coordinates clamped to the frame.
    pub fn get_clamped(&self, x: i64, y: i64) -> u8 {
        let cx = x.clamp(0, self.width as i64 - 1) as u32;
        let cy = y.clamp(0, self.height as i64 - 1) as u32;
        self.get(cx, cy)
    }
}

/// Binary edge raster plus its foreground as a flat point list.
///
/// The point list preserves insertion order, which for the preprocessing
/// pipeline is row-major scan order. The detector relies on this order
/// being deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeMap {
    width: u32,
    height: u32,
    mask: Vec<bool>,
    points: Vec<(u32, u32)>,
}

impl EdgeMap {
    pub fn new(width: u32, height: u32) -> Self {
        assert!(width >= 1 && height >= 1);
        EdgeMap {
            width,
            height,
            mask: vec![false; (width * height) as usize],
            points: Vec::new(),
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn contains(&self, x: u32, y: u32) -> bool {
        x < self.width && y < self.height && self.mask[(y * self.width + x) as usize]
    }

    /// Marks a foreground pixel; no-op if already set.
    pub fn set(&mut self, x: u32, y: u32) {
        assert!(x < self.width && y < self.height, "point outside frame");
        let idx = (y * self.width + x) as usize;
        if !self.mask[idx] {
            self.mask[idx] = true;
            self.points.push((x, y));
        }
    }

    /// Foreground points in insertion order.
    pub fn points(&self) -> &[(u32, u32)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Renders the edge map as a graymap (foreground 255, background 0).
    pub fn to_raster(&self) -> GrayRaster {
        let samples = self.mask.iter().map(|&m| if m { 255 } else { 0 }).collect();
        GrayRaster::new(self.width, self.height, samples)
    }

    /// Treats every nonzero sample as foreground.
    pub fn from_raster(raster: &GrayRaster) -> Self {
        let mut map = EdgeMap::new(raster.width(), raster.height());
        for y in 0..raster.height() {
            for x in 0..raster.width() {
                if raster.get(x, y) > 0 {
                    map.set(x, y);
                }
            }
        }
        map
    }
}

struct TokenReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> TokenReader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        TokenReader { bytes, pos: 0 }
    }

    fn skip_separators(&mut self) {
        while self.pos < self.bytes.len() {
            let c = self.bytes[self.pos];
            if c.is_ascii_whitespace() {
                self.pos += 1;
            } else if c == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn next_u32(&mut self) -> Result<u32> {
        self.skip_separators();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            if self.pos >= self.bytes.len() {
                return Err(Error::Truncated("header or sample missing".into()));
            }
            return Err(Error::Format(format!(
                "expected integer at byte {}",
                self.pos
            )));
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        text.parse::<u32>()
            .map_err(|_| Error::Format(format!("integer out of range: {text}")))
    }
}

/// Decodes a P2/P5 graymap or P6 pixmap into a gray raster.
pub fn read_gray_image(bytes: &[u8]) -> Result<GrayRaster> {
    if bytes.len() < 2 {
        return Err(Error::Format("missing magic number".into()));
    }
    let magic = &bytes[..2];
    if !matches!(magic, b"P2" | b"P5" | b"P6") {
        return Err(Error::Format(format!(
            "unrecognized magic {:?}",
            String::from_utf8_lossy(magic)
        )));
    }
    let mut reader = TokenReader::new(&bytes[2..]);
    let width = reader.next_u32()?;
    let height = reader.next_u32()?;
    let maxval = reader.next_u32()?;
    if width == 0 || height == 0 {
        return Err(Error::Format("zero image dimension".into()));
    }
    if maxval != 255 {
        return Err(Error::Unsupported(format!("maxval {maxval}, only 255")));
    }
    let count = (width * height) as usize;

    match magic {
        b"P2" => {
            let mut samples = Vec::with_capacity(count);
            for _ in 0..count {
                let v = reader.next_u32()?;
                if v > 255 {
                    return Err(Error::Format(format!("sample {v} exceeds maxval")));
                }
                samples.push(v as u8);
            }
            Ok(GrayRaster::new(width, height, samples))
        }
        b"P5" => {
            let payload = binary_payload(bytes, reader.pos + 2, count)?;
            Ok(GrayRaster::new(width, height, payload.to_vec()))
        }
        b"P6" => {
            let payload = binary_payload(bytes, reader.pos + 2, count * 3)?;
            let samples = payload
                .chunks_exact(3)
                .map(|px| {
                    let sum = px[0] as u16 + px[1] as u16 + px[2] as u16;
                    // channel mean, rounded to nearest
                    ((sum + 1) / 3) as u8
                })
                .collect();
            Ok(GrayRaster::new(width, height, samples))
        }
        _ => unreachable!(),
    }
}

fn binary_payload(bytes: &[u8], after_maxval: usize, count: usize) -> Result<&[u8]> {
    // exactly one whitespace byte separates the header from the payload
    if after_maxval >= bytes.len() || !bytes[after_maxval].is_ascii_whitespace() {
        return Err(Error::Format("missing separator after maxval".into()));
    }
    let start = after_maxval + 1;
    if bytes.len() < start + count {
        return Err(Error::Truncated(format!(
            "payload has {} bytes, header promises {}",
            bytes.len().saturating_sub(start),
            count
        )));
    }
    Ok(&bytes[start..start + count])
}

/// Encodes as binary P5.
pub fn write_pgm(raster: &GrayRaster) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", raster.width(), raster.height()).into_bytes();
    out.extend_from_slice(raster.samples());
    out
}

/// Encodes as ASCII P2, one row per line.
pub fn write_pgm_ascii(raster: &GrayRaster) -> Vec<u8> {
    let mut out = format!("P2\n{} {}\n255\n", raster.width(), raster.height());
    for row in raster.samples().chunks(raster.width() as usize) {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out.into_bytes()
}

/// Re-encodes `base` with each ellipse contour stroked at `stroke`.
///
/// A pixel is stroked iff its center lies within 0.5 px of a contour;
/// out-of-frame contour portions are clipped. `base` is not mutated.
pub fn write_overlay(base: &GrayRaster, ellipses: &[Ellipse], stroke: u8) -> Vec<u8> {
    let mut out = base.clone();
    for e in ellipses {
        stroke_contour(&mut out, e, stroke);
    }
    write_pgm(&out)
}

fn stroke_contour(raster: &mut GrayRaster, e: &Ellipse, stroke: u8) {
    // Dense parametric walk; every pixel center within 0.5 px of a sample
    // is within 0.5 px of the contour itself.
    let steps = ((e.perimeter() * 10.0).ceil() as usize).max(64);
    for i in 0..steps {
        let t = i as f64 * std::f64::consts::TAU / steps as f64;
        let (x, y) = e.point_at(t);
        let px0 = x.floor() as i64;
        let py0 = y.floor() as i64;
        for py in py0 - 1..=py0 + 1 {
            for px in px0 - 1..=px0 + 1 {
                if px < 0 || py < 0 || px >= raster.width() as i64 || py >= raster.height() as i64 {
                    continue;
                }
                let d2 = (px as f64 - x).powi(2) + (py as f64 - y).powi(2);
                if d2 <= 0.25 {
                    raster.set(px as u32, py as u32, stroke);
                }
            }
        }
    }
}

pub const ELLIPSE_CSV_HEADER: &str = "center_x,center_y,major_axis,minor_axis,alpha_rad";
pub const STATS_CSV_HEADER: &str =
    "virtual_ellipses,real_ellipses,ellipse_quality,search_point_pairs,total_edge_points";

fn ellipse_record(e: &Ellipse) -> String {
    // centers to 0.1 px, axes to whole pixels, alpha to 3 decimals
    format!(
        "{:.1},{:.1},{:.0},{:.0},{:.3}",
        e.x0, e.y0, e.a, e.b, e.alpha
    )
}

/// One CSV line per ellipse, header first.
pub fn ellipses_csv(ellipses: &[Ellipse]) -> String {
    let mut out = String::from(ELLIPSE_CSV_HEADER);
    out.push('\n');
    for e in ellipses {
        out.push_str(&ellipse_record(e));
        out.push('\n');
    }
    out
}

/// Single-record stats CSV, header first.
pub fn stats_csv(stats: &RunStats) -> String {
    format!(
        "{}\n{},{},{},{},{}\n",
        STATS_CSV_HEADER,
        stats.virtual_ellipses,
        stats.real_ellipses,
        stats.ellipse_quality,
        stats.search_point_pairs,
        stats.total_edge_points
    )
}

#[derive(Serialize)]
struct Report<'a> {
    ellipses: &'a [Ellipse],
    stats: &'a RunStats,
}

/// Combined JSON report carrying full-precision parameters.
pub fn results_json(ellipses: &[Ellipse], stats: &RunStats) -> String {
    serde_json::to_string_pretty(&Report { ellipses, stats }).expect("report serialization")
}
