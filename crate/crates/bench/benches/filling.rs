use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use dehnfill::search::{evaluate, search_equal_pvol};
use dehnfill::{filling_invariants, solve_filling, FillingSlope, Float, SlopeRange};
use dehnfill_bench::{cubic_curve, dense_series, sgi_twin, symmetric_curve};

fn series(c: &mut Criterion) {
    let mut g = c.benchmark_group("series");
    for order in [9u32, 17] {
        let s = dense_series(order, 256);
        g.bench_with_input(BenchmarkId::new("mul", order), &s, |b, s| b.iter(|| s.mul(black_box(s)).unwrap()));
        g.bench_with_input(BenchmarkId::new("partial", order), &s, |b, s| b.iter(|| black_box(s).partial(0).unwrap()));
    }
    g.finish();
}

fn filling(c: &mut Criterion) {
    let mut g = c.benchmark_group("filling");
    let slope = FillingSlope::with_canonical_completion(101, 3).unwrap();
    for prec in [128u32, 256, 512] {
        let m = cubic_curve(prec);
        m.longitudes().unwrap();
        g.bench_with_input(BenchmarkId::new("solve", prec), &m, |b, m| b.iter(|| solve_filling(m, &[slope], prec).unwrap()));
        let sol = solve_filling(&m, &[slope], prec).unwrap();
        g.bench_with_input(BenchmarkId::new("invariants", prec), &m, |b, m| b.iter(|| filling_invariants(m, black_box(&sol)).unwrap()));
    }
    let m = symmetric_curve(41, 256);
    m.longitudes().unwrap();
    g.bench_function("evaluate/order-41", |b| b.iter(|| evaluate(&m, &[slope]).unwrap()));
    g.finish();
}

fn search(c: &mut Criterion) {
    let mut g = c.benchmark_group("search");
    g.sample_size(10);
    let m = sgi_twin(256);
    let tol = Float::with_val(256, 1e-20);
    g.bench_function("sgi/17-18", |b| b.iter(|| search_equal_pvol(&m, SlopeRange::new(17, 18).unwrap(), &tol).unwrap()));
    g.finish();
}

criterion_group!(benches, series, filling, search);
criterion_main!(benches);
