use std::hint::black_box;

use buhmann::certify::random_points;
use buhmann::interp::build_gram;
use buhmann::spectral::{Backend, SpectralDensity};
use buhmann::{BuhmannParams, DiffParams, Exec, RadialKernel};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Exec); 2] = [("Parallel", Exec::Parallel), ("Sequential", Exec::Sequential)];

fn spectral_grid(c: &mut Criterion) {
    let mut g = c.benchmark_group("spectral_grid");
    g.sample_size(10);
    let ts: Vec<f64> = (0..256).map(|i| 40.0 * i as f64 / 255.0).collect();
    let d = DiffParams::new(4.5, 1.0, 1.0, 0.75, 1.0).unwrap();
    let s = SpectralDensity::new(RadialKernel::difference(d), 2, Backend::Quadrature).unwrap();
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new(name, ts.len()), &ts, |b, ts| {
            b.iter(|| black_box(s.eval_grid(ts, exec).unwrap()))
        });
    }
    g.finish();
}

fn gram_build(c: &mut Criterion) {
    let mut g = c.benchmark_group("gram_build");
    g.sample_size(10);
    let ps = random_points(2, 300, 6.0, 1);
    let k = RadialKernel::buhmann(BuhmannParams::new(2.0, 3.0, 1.0, 1.5).unwrap());
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new(name, ps.len()), &ps, |b, ps| {
            b.iter(|| black_box(build_gram(ps, &k, exec).unwrap()))
        });
    }
    g.finish();
}

fn kernel_grid(c: &mut Criterion) {
    let mut g = c.benchmark_group("kernel_eval_grid");
    let xs: Vec<f64> = (0..4096).map(|i| i as f64 / 4096.0).collect();
    let k = RadialKernel::h(3.5, 2.5).unwrap();
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new(name, xs.len()), &xs, |b, xs| {
            b.iter(|| black_box(k.eval_grid(xs, exec).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, spectral_grid, gram_build, kernel_grid);
criterion_main!(benches);
