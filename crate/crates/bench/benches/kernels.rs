use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gramheight::charpoly::{gen_charpoly_direct, gen_charpoly_subset, LambdaWeights};
use gramheight::engine::{batch_determinants, ratio_series, EngineConfig, GramState};
use gramheight::family::VectorFamily;
use gramheight::linalg::sym_determinant;
use gramheight::{gram_matrix, Matrix, Rational, Scalar, Tolerance};

fn vectors<S: Scalar>(count: usize, len: usize) -> Vec<Vec<S>> {
    (0..count)
        .map(|r| (0..len).map(|k| S::from_i64(((r * 7 + k * 3) % 11) as i64 - 5)).collect())
        .collect()
}

fn determinants(c: &mut Criterion) {
    let mut g = c.benchmark_group("gram_determinant");
    for order in [4usize, 8, 12] {
        let exact = gram_matrix(&vectors::<Rational>(order, 2 * order)).unwrap();
        let float = gram_matrix(&vectors::<f64>(order, 2 * order)).unwrap();
        g.bench_with_input(BenchmarkId::new("exact", order), &exact, |b, m| {
            b.iter(|| sym_determinant(black_box(m)))
        });
        g.bench_with_input(BenchmarkId::new("float", order), &float, |b, m| {
            b.iter(|| sym_determinant(black_box(m)))
        });
    }
    g.finish();
}

fn charpoly(c: &mut Criterion) {
    let mut g = c.benchmark_group("charpoly");
    for order in [4usize, 6, 8] {
        let m = Matrix::<Rational>::from_fn(order, order, |i, j| Rational::from_i64(((i * 5 + j * 3) % 7) as i64 - 3));
        let lambda = LambdaWeights::new((1..=order as i64).map(Rational::from_i64).collect());
        g.bench_with_input(BenchmarkId::new("direct", order), &order, |b, _| {
            b.iter(|| gen_charpoly_direct(black_box(&m), &lambda).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("subset", order), &order, |b, _| {
            b.iter(|| gen_charpoly_subset(black_box(&m), &lambda).unwrap())
        });
    }
    g.finish();
}

/// One rank-one step against recomputing both determinants at the same `n`.
fn streaming(c: &mut Criterion) {
    let mut g = c.benchmark_group("ratio_step");
    let tol = Tolerance::default();
    for m in [1usize, 3] {
        let fam = VectorFamily::<Rational>::monomial(m);
        let mut warm = GramState::new(m + 1, 0, false, EngineConfig::default()).unwrap();
        for _ in 0..256 {
            warm.advance(&fam).unwrap();
        }
        g.bench_with_input(BenchmarkId::new("incremental", m), &m, |b, _| {
            b.iter_batched(|| warm.clone(), |mut st| st.advance(&fam).unwrap(), criterion::BatchSize::SmallInput)
        });
        g.bench_with_input(BenchmarkId::new("batch", m), &m, |b, _| {
            b.iter(|| batch_determinants(&fam, 257, 0, false, &tol).unwrap())
        });
    }
    g.finish();

    let mut g = c.benchmark_group("ratio_series");
    g.sample_size(10);
    for mode in ["exact", "float"] {
        g.bench_function(BenchmarkId::new(mode, 1000), |b| match mode {
            "exact" => b.iter(|| ratio_series(&VectorFamily::<Rational>::monomial(2), 1000, 0, EngineConfig::default()).unwrap()),
            _ => b.iter(|| ratio_series(&VectorFamily::<f64>::monomial(2), 1000, 0, EngineConfig::default()).unwrap()),
        });
    }
    g.finish();
}

criterion_group!(benches, determinants, charpoly, streaming);
criterion_main!(benches);
