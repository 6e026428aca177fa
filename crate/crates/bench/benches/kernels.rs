use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use ifp_core::validation::{asset_grid, grid_dp};
use ifp_core::{
    derivatives, discrete_policy, h_closed_r0, h_numeric, lambert_wm1, wm1_branch_offset,
    ModelParams,
};

fn lambert(c: &mut Criterion) {
    let xs: Vec<f64> = (1..=1000).map(|i| -0.367 * i as f64 / 1000.0).collect();
    c.bench_function("lambert_wm1/1000 points", |b| {
        b.iter(|| xs.iter().map(|&x| lambert_wm1(black_box(x)).unwrap()).sum::<f64>())
    });
    c.bench_function("wm1_branch_offset/1000 points", |b| {
        b.iter(|| {
            (1..=1000)
                .map(|i| wm1_branch_offset(black_box(i as f64 * 1e-2)).unwrap())
                .sum::<f64>()
        })
    });
}

fn depletion(c: &mut Criterion) {
    let r0 = ModelParams::new(0.08, 0.0, 0.5, 3.0).unwrap();
    let fig = ModelParams::figure();
    c.bench_function("h_closed_r0", |b| b.iter(|| h_closed_r0(&r0, black_box(3.0)).unwrap()));
    c.bench_function("h_numeric r=0", |b| b.iter(|| h_numeric(&r0, black_box(3.0)).unwrap()));
    c.bench_function("h_numeric r=0.01", |b| b.iter(|| h_numeric(&fig, black_box(3.0)).unwrap()));
    c.bench_function("derivatives r=0", |b| b.iter(|| derivatives(&r0, black_box(3.0)).unwrap()));
}

fn discrete(c: &mut Criterion) {
    let fig = ModelParams::figure();
    c.bench_function("discrete_policy to a=30", |b| {
        b.iter(|| discrete_policy(&fig, black_box(1.0), 30.0).unwrap())
    });
    let grid = asset_grid(3.0, 30.0, 500).unwrap();
    let mut group = c.benchmark_group("grid_dp");
    group.sample_size(10);
    group.bench_function("500 nodes", |b| b.iter(|| grid_dp(&fig, 1.0, black_box(&grid)).unwrap()));
    group.finish();
}

criterion_group!(benches, lambert, depletion, discrete);
criterion_main!(benches);
