use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use rht_ellipse::detector::DetectionConfig;
use rht_ellipse::pipeline::{exit_code, run_pipeline, PipelineConfig};

/// Detect ellipses in a graymap/pixmap image and write parameter and
/// statistics tables.
#[derive(Parser, Debug)]
#[command(name = "rht-ellipse", version, about)]
struct Args {
    /// Input image (PGM P2/P5 or PPM P6, maxval 255)
    #[arg(long)]
    input: PathBuf,

    /// Prefix for output files (<prefix>.ellipses.csv, .stats.csv,
    /// .report.json, .overlay.pgm)
    #[arg(long)]
    out_prefix: PathBuf,

    /// RNG seed for the randomized sampling stage
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Pair budget factor C; m = C * n pairs are drawn
    #[arg(long, default_value_t = 2)]
    c_factor: u32,

    /// Minimum accumulator peak votes (contour points) per ellipse
    #[arg(long, default_value_t = 200)]
    quality: u32,

    /// Clustering similarity threshold on the feature distance
    #[arg(long, default_value_t = 20.0)]
    dt: f64,

    /// Minimum half major axis, pixels
    #[arg(long, default_value_t = 10.0)]
    a_min: f64,

    /// Maximum half major axis, pixels
    #[arg(long, default_value_t = 100.0)]
    a_max: f64,

    /// Minimum half minor axis, pixels
    #[arg(long, default_value_t = 5.0)]
    b_min: f64,

    /// Accumulator bin width for the half minor axis, pixels
    #[arg(long, default_value_t = 2.0)]
    bin_width: f64,

    /// Minimum small-side/large-side contour point ratio
    #[arg(long, default_value_t = 0.35)]
    side_balance: f64,

    /// Contour band thickness for the side filter, pixels
    #[arg(long, default_value_t = 1.5)]
    tolerance: f64,

    /// Compare cluster orientations mod pi instead of raw subtraction
    #[arg(long, default_value_t = false)]
    wrap_alpha: bool,

    /// Write <prefix>.overlay.pgm with detected contours stroked
    #[arg(long, default_value_t = false)]
    overlay: bool,

    /// Write <prefix>.stats.csv
    #[arg(long, default_value_t = false)]
    stats: bool,

    /// Input is already a binarized edge map; skip preprocessing
    #[arg(long, default_value_t = false)]
    edges_only: bool,
}

impl Args {
    fn into_config(self) -> PipelineConfig {
        PipelineConfig {
            input: self.input,
            out_prefix: self.out_prefix,
            detection: DetectionConfig {
                c_factor: self.c_factor,
                a_min: self.a_min,
                a_max: self.a_max,
                b_min: self.b_min,
                quality_threshold: self.quality,
                side_balance_min: self.side_balance,
                contour_tolerance: self.tolerance,
                accumulator_bin_width: self.bin_width,
                rng_seed: self.seed,
            },
            d_threshold: self.dt,
            wrap_alpha: self.wrap_alpha,
            emit_overlay: self.overlay,
            emit_stats: self.stats,
            skip_preprocess: self.edges_only,
        }
    }
}

fn main() -> ExitCode {
    let config = Args::parse().into_config();
    match run_pipeline(&config) {
        Ok(outcome) => {
            println!(
                "{} real / {} virtual ellipses from {} edge points ({} pairs)",
                outcome.stats.real_ellipses,
                outcome.stats.virtual_ellipses,
                outcome.stats.total_edge_points,
                outcome.stats.search_point_pairs
            );
            for path in &outcome.files {
                println!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("{{\"error\": \"{err}\"}}");
            ExitCode::from(exit_code(&err) as u8)
        }
    }
}
