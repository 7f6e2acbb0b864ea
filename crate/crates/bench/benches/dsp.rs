use criterion::{criterion_group, criterion_main, Criterion, Throughput};
use std::f64::consts::PI;
use std::hint::black_box;
use std::sync::Arc;
use vibronav::dsp::{
    integrated_loudness, thd, BlockRenderer, StimulusParams, TrackGroup, DEFAULT_BLOCK_SIZE,
    DEFAULT_HARMONICS,
};
use vibronav::{Condition, GainPair};

fn loudness(c: &mut Criterion) {
    let stim = StimulusParams::default().generate().unwrap();
    let mix = stim.group(TrackGroup::Mix).clone();
    let mut g = c.benchmark_group("loudness");
    g.throughput(Throughput::Elements(mix.frames() as u64));
    g.bench_function("integrated_8s", |b| {
        b.iter(|| integrated_loudness(black_box(&mix)).unwrap())
    });
    g.finish();
}

fn distortion(c: &mut Criterion) {
    let fs = 48_000.0;
    let s: Vec<f64> = (0..1 << 16)
        .map(|i| (2.0 * PI * 100.0 * i as f64 / fs).sin())
        .collect();
    c.bench_function("thd_64k", |b| {
        b.iter(|| thd(black_box(&s), fs, DEFAULT_HARMONICS).unwrap())
    });
}

fn render(c: &mut Criterion) {
    let stim = Arc::new(
        StimulusParams {
            seconds: 4.0,
            ..Default::default()
        }
        .generate()
        .unwrap(),
    );
    let mut g = c.benchmark_group("render_1s");
    g.throughput(Throughput::Elements(48_000));
    for cond in [Condition::Nt, Condition::HapDirDist] {
        let mut r = BlockRenderer::new(stim.clone(), DEFAULT_BLOCK_SIZE);
        g.bench_function(cond.to_string(), |b| {
            b.iter(|| {
                let mut acc = 0f32;
                r.render(
                    48_000,
                    cond,
                    GainPair {
                        left: 0.6,
                        right: 0.2,
                    },
                    30.0,
                    |a, h| {
                        acc += a[0] + h[0];
                    },
                );
                acc
            })
        });
    }
    g.finish();
}

criterion_group!(benches, loudness, distortion, render);
criterion_main!(benches);
