//! End-to-end driver: file in, result files out.

use std::fs;
use std::path::{Path, PathBuf};

use crate::cluster::{cluster_ellipses_with, representatives, ClusterOptions};
use crate::detector::{detect_all, DetectionConfig, RunStats};
use crate::ellipse::Ellipse;
use crate::error::{Error, Result};
use crate::preprocess;
use crate::raster_io::{
    ellipses_csv, read_gray_image, results_json, stats_csv, write_overlay, EdgeMap, GrayRaster,
};

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub out_prefix: PathBuf,
    pub detection: DetectionConfig,
    pub d_threshold: f64,
    pub wrap_alpha: bool,
    pub emit_overlay: bool,
    pub emit_stats: bool,
    /// Treat the input as an already-binarized edge map (nonzero =
    /// foreground) and skip the preprocessing front end.
    pub skip_preprocess: bool,
}

#[derive(Debug)]
pub struct PipelineOutcome {
    pub ellipses: Vec<Ellipse>,
    pub stats: RunStats,
    pub files: Vec<PathBuf>,
}

fn out_path(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.file_name().unwrap_or_default().to_os_string();
    name.push(suffix);
    prefix.with_file_name(name)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Runs read -> preprocess -> detect -> cluster -> write.
pub fn run_pipeline(config: &PipelineConfig) -> Result<PipelineOutcome> {
    if config.d_threshold <= 0.0 {
        return Err(Error::Config("d_threshold must be positive".into()));
    }
    config.detection.validate()?;

    let bytes = fs::read(&config.input)
        .map_err(|e| Error::Format(format!("{}: {e}", config.input.display())))?;
    let gray = read_gray_image(&bytes)?;
    let edges = derive_edges(&gray, config)?;

    let (virtual_ellipses, mut stats) = detect_all(&edges, &config.detection)?;
    let clusters = cluster_ellipses_with(
        &virtual_ellipses,
        ClusterOptions {
            d_threshold: config.d_threshold,
            wrap_alpha: config.wrap_alpha,
        },
    );
    let reals = representatives(&clusters);
    stats.real_ellipses = reals.len() as u64;

    let mut files = Vec::new();
    let ellipses_path = out_path(&config.out_prefix, ".ellipses.csv");
    write_atomic(&ellipses_path, ellipses_csv(&reals).as_bytes())?;
    files.push(ellipses_path);

    if config.emit_stats {
        let stats_path = out_path(&config.out_prefix, ".stats.csv");
        write_atomic(&stats_path, stats_csv(&stats).as_bytes())?;
        files.push(stats_path);
    }

    let report_path = out_path(&config.out_prefix, ".report.json");
    write_atomic(&report_path, results_json(&reals, &stats).as_bytes())?;
    files.push(report_path);

    if config.emit_overlay {
        let overlay_path = out_path(&config.out_prefix, ".overlay.pgm");
        write_atomic(&overlay_path, &write_overlay(&gray, &reals, 255))?;
        files.push(overlay_path);
    }

    Ok(PipelineOutcome {
        ellipses: reals,
        stats,
        files,
    })
}

fn derive_edges(gray: &GrayRaster, config: &PipelineConfig) -> Result<EdgeMap> {
    let edges = if config.skip_preprocess {
        EdgeMap::from_raster(gray)
    } else {
        preprocess::edges_from_gray(gray)?
    };
    if edges.is_empty() {
        return Err(Error::NoEdges);
    }
    Ok(edges)
}

/// Maps pipeline failures onto the documented process exit codes.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NoEdges => 3,
        Error::Config(_) => 4,
        Error::Format(_)
        | Error::Truncated(_)
        | Error::Unsupported(_)
        | Error::TooSmall { .. }
        | Error::EmptyHistogram
        | Error::Io(_) => 2,
    }
}
