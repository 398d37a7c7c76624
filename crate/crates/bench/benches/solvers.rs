use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use wedgeflow_core::fbsolver::{solve_regular_reflection, SolverConfig};
use wedgeflow_core::polar::{detachment_angle, solve_roots, sweep, transition_angles};
use wedgeflow_core::{Branch, Problem};

fn polar(c: &mut Criterion) {
    let pb = Problem::new(2.0, 1.0, 2.0).unwrap();
    c.bench_function("polar roots 85deg", |b| {
        b.iter(|| solve_roots(&pb, black_box(85f64.to_radians())).unwrap())
    });
    c.bench_function("detachment angle", |b| {
        b.iter(|| detachment_angle(black_box(&pb)).unwrap())
    });
    c.bench_function("transition angles", |b| {
        b.iter(|| transition_angles(black_box(&pb)).unwrap())
    });
    let angles: Vec<f64> = (0..30).map(|k| (60.0 + k as f64).to_radians()).collect();
    c.bench_function("sweep 30 angles", |b| {
        b.iter(|| sweep(&pb, black_box(&angles)))
    });
}

fn free_boundary(c: &mut Criterion) {
    let mut g = c.benchmark_group("free boundary");
    g.sample_size(10);
    for n in [16, 32] {
        let cfg = SolverConfig::with_grid(n, n);
        g.bench_function(format!("85deg {n}x{n}"), |b| {
            b.iter(|| {
                solve_regular_reflection(2.0, 1.0, 2.0, 85f64.to_radians(), Branch::Weak, &cfg)
                    .unwrap()
            })
        });
    }
    g.finish();
}

criterion_group!(benches, polar, free_boundary);
criterion_main!(benches);
