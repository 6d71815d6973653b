//! Parallel vs sequential throughput of the detector inner loop.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use rht_ellipse::detector::{detect_all, detect_all_sequential, DetectionConfig};
use rht_ellipse::preprocess;
use rht_ellipse::raster_io::GrayRaster;
use rht_ellipse::synth::{random_scene, rasterize, SceneParams};

fn bench_detect(c: &mut Criterion) {
    let mut group = c.benchmark_group("detect_all");
    for clutter in [150u32, 600] {
        let params = SceneParams {
            clutter_points: clutter,
            ..SceneParams::default()
        };
        let edges = rasterize(&random_scene(&params, 42));
        let config = DetectionConfig {
            rng_seed: 7,
            ..DetectionConfig::default()
        };
        group.bench_with_input(
            BenchmarkId::new("parallel", edges.len()),
            &edges,
            |b, edges| b.iter(|| detect_all(black_box(edges), &config).unwrap()),
        );
        group.bench_with_input(
            BenchmarkId::new("sequential", edges.len()),
            &edges,
            |b, edges| b.iter(|| detect_all_sequential(black_box(edges), &config).unwrap()),
        );
    }
    group.finish();
}

fn bench_preprocess(c: &mut Criterion) {
    let samples: Vec<u8> = (0..320u32 * 240)
        .map(|i| (i.wrapping_mul(2654435761) >> 24) as u8)
        .collect();
    let raster = GrayRaster::new(320, 240, samples);
    c.bench_function("edges_from_gray/320x240", |b| {
        b.iter(|| preprocess::edges_from_gray(black_box(&raster)).unwrap())
    });
}

criterion_group!(benches, bench_detect, bench_preprocess);
criterion_main!(benches);
