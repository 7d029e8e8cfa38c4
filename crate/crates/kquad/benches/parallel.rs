//! Rayon vs sequential backends on the hot loops, plus the end-to-end
//! greedy driver as dispatched by the `parallel` feature.
//!
//! Run `cargo bench` for the default (parallel) build; the `*_seq` entries
//! measure the identical per-element code on one thread, so the pairs give
//! the speedup directly. `cargo bench --no-default-features` builds the
//! whole crate sequential for an end-to-end comparison.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use kquad::exec;
use kquad::oracle::separated_uniform;
use kquad::{
    monte_carlo_functional, run_greedy, DensitySpec, DiscreteFunctional, DomainSpec,
    KernelFamily, KernelSpec, SelectionRule, Termination,
};

fn kernel() -> KernelSpec {
    KernelSpec::new(KernelFamily::MaternQuadratic, 1.0, 2).unwrap()
}

fn bench_gram_rows(c: &mut Criterion) {
    let k = kernel();
    let pts = separated_uniform(1, 1200, 2, 0.001);
    let mut group = c.benchmark_group("gram_row_fill");
    let fill = |backend_par: bool| {
        let n = pts.len();
        let row = |i: usize| -> f64 {
            let xi = pts.point(i);
            let mut acc = 0.0;
            for j in 0..n {
                acc += k.eval(xi, pts.point(j)).unwrap();
            }
            acc
        };
        if backend_par {
            #[cfg(feature = "parallel")]
            {
                return exec::map_range_par(n, row);
            }
            #[cfg(not(feature = "parallel"))]
            {
                return exec::map_range_seq(n, row);
            }
        }
        exec::map_range_seq(n, row)
    };
    group.bench_function(BenchmarkId::new("seq", pts.len()), |b| {
        b.iter(|| black_box(fill(false)))
    });
    #[cfg(feature = "parallel")]
    group.bench_function(BenchmarkId::new("par", pts.len()), |b| {
        b.iter(|| black_box(fill(true)))
    });
    group.finish();
}

fn bench_score_argmax(c: &mut Criterion) {
    let n = 100_000usize;
    let residual: Vec<f64> = (0..n).map(|i| ((i as f64) * 0.37).sin()).collect();
    let power: Vec<f64> = (0..n).map(|i| 0.1 + ((i as f64) * 0.11).cos().abs()).collect();
    let score = |i: usize| -> Option<f64> { Some(residual[i].abs() / power[i].sqrt()) };

    let mut group = c.benchmark_group("score_argmax");
    group.bench_function(BenchmarkId::new("seq", n), |b| {
        b.iter(|| black_box(exec::max_scored_seq(n, score)))
    });
    #[cfg(feature = "parallel")]
    group.bench_function(BenchmarkId::new("par", n), |b| {
        b.iter(|| black_box(exec::max_scored_par(n, score)))
    });
    group.finish();
}

fn bench_column_update(c: &mut Criterion) {
    // The shape of one Newton extension: subtract 64 projected columns over
    // 50k candidates.
    let n = 50_000usize;
    let k = 64usize;
    let cols: Vec<Vec<f64>> = (0..k)
        .map(|c| (0..n).map(|i| ((i + c) as f64 * 1e-4).sin()).collect())
        .collect();
    let head: Vec<f64> = (0..k).map(|c| 0.3 + c as f64 * 0.01).collect();
    let update = |i: usize| -> f64 {
        let mut v = 1.0;
        for (h, col) in head.iter().zip(&cols) {
            v -= h * col[i];
        }
        v * 0.5
    };

    let mut group = c.benchmark_group("newton_column");
    group.bench_function(BenchmarkId::new("seq", n), |b| {
        b.iter(|| black_box(exec::map_range_seq(n, update)))
    });
    #[cfg(feature = "parallel")]
    group.bench_function(BenchmarkId::new("par", n), |b| {
        b.iter(|| black_box(exec::map_range_par(n, update)))
    });
    group.finish();
}

fn bench_hnorm(c: &mut Criterion) {
    let k = kernel();
    let density = DensitySpec::Constant { value: 1.0 };
    let f = monte_carlo_functional(&density, &DomainSpec::unit_box(2), 2000, 5).unwrap();
    let mut group = c.benchmark_group("hnorm_squared");
    group.sample_size(10);
    group.bench_function("dispatched_2000", |b| {
        b.iter(|| black_box(f.hnorm_squared(&k).unwrap()))
    });
    group.finish();
}

fn bench_greedy_run(c: &mut Criterion) {
    let k = kernel();
    let density = DensitySpec::IndicatorBox {
        lo: vec![0.3, 0.6],
        hi: vec![0.5, 0.8],
    };
    let f = monte_carlo_functional(&density, &DomainSpec::unit_box(2), 500, 7).unwrap();
    let nodes = f.nodes().clone();
    let weights = f.weights().to_vec();
    let cands = separated_uniform(3, 1000, 2, 0.001);
    let mut group = c.benchmark_group("run_greedy");
    group.sample_size(10);
    group.bench_function("n60_cands1000", |b| {
        b.iter(|| {
            let f = DiscreteFunctional::new(nodes.clone(), weights.clone()).unwrap();
            black_box(
                run_greedy(
                    &k,
                    &cands,
                    &f,
                    SelectionRule::FOverP,
                    &Termination::max_n(60),
                )
                .unwrap(),
            )
        })
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_gram_rows,
    bench_score_argmax,
    bench_column_update,
    bench_hnorm,
    bench_greedy_run
);
criterion_main!(benches);
