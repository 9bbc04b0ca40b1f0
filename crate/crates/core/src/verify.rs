//! Seeded randomized checks of the algebraic identities behind the library,
//! run in exact arithmetic so every comparison is an equality.

use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::charpoly::{
    cauchy_binet_check, delta_identity_check, gen_charpoly_direct, gen_charpoly_subset,
    inverse_lambda, quadform_lambda, LambdaWeights,
};
use crate::error::{Error, Result};
use crate::hyperplane::{
    constrained_min, diagonal_constrained_min, distance_squared, minimizer_cramer,
    residual_inner_products,
};
use crate::linalg::spd_solve;
use crate::matrix::{gram_matrix, Matrix, SubsetIndex, SymMatrix};
use crate::scalar::{dot, Rational, Scalar, Tolerance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Upper bound on vector counts and matrix orders in every suite.
    pub max_order: usize,
    /// Random instances per suite.
    pub cases: usize,
    /// Random feasible points tested per constrained-minimum instance.
    pub feasible_points: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            max_order: 8,
            cases: 200,
            feasible_points: 1000,
        }
    }
}

/// Failures kept per suite; the count is always complete.
const FAILURE_SAMPLES: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub description: &'static str,
    pub cases: usize,
    pub passed: usize,
    pub failed: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(name: &'static str, description: &'static str) -> Self {
        Self {
            name,
            description,
            cases: 0,
            passed: 0,
            failed: 0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            if self.failures.len() < FAILURE_SAMPLES {
                self.failures.push(what());
            }
        }
    }

    fn record_result(&mut self, r: Result<bool>, what: impl FnOnce() -> String) {
        match r {
            Ok(ok) => self.record(ok, what),
            Err(e) => self.record(false, || format!("{}: {e}", what())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub config: VerifyConfig,
    pub suites: Vec<SuiteReport>,
}

impl VerifyReport {
    pub fn passed(&self) -> usize {
        self.suites.iter().map(|s| s.passed).sum()
    }

    pub fn failed(&self) -> usize {
        self.suites.iter().map(|s| s.failed).sum()
    }

    pub fn all_passed(&self) -> bool {
        self.failed() == 0
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteReport> {
        self.suites.iter().find(|s| s.name == name)
    }
}

struct Gen(ChaCha8Rng);

impl Gen {
    fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self(rng)
    }

    fn size(&mut self, lo: usize, hi: usize) -> usize {
        self.0.gen_range(lo..=hi)
    }

    fn int(&mut self) -> Rational {
        Rational::from_i64(self.0.gen_range(-5..=5))
    }

    fn positive(&mut self) -> Rational {
        Rational::from_ratio(self.0.gen_range(1..=6), self.0.gen_range(1..=3))
    }

    fn square(&mut self) -> Rational {
        let r = Rational::from_ratio(self.0.gen_range(1..=4), self.0.gen_range(1..=3));
        r.clone() * r
    }

    fn vector(&mut self, len: usize) -> Vec<Rational> {
        (0..len).map(|_| self.int()).collect()
    }

    fn vectors(&mut self, count: usize, len: usize) -> Vec<Vec<Rational>> {
        (0..count).map(|_| self.vector(len)).collect()
    }

    fn matrix(&mut self, rows: usize, cols: usize) -> Matrix<Rational> {
        Matrix::from_fn(rows, cols, |_, _| self.int())
    }

    fn weights(&mut self, n: usize) -> LambdaWeights<Rational> {
        LambdaWeights::new((0..n).map(|_| self.positive()).collect())
    }

    fn nonzero_vector(&mut self, len: usize) -> Vec<Rational> {
        loop {
            let v = self.vector(len);
            if v.iter().any(|x| !num_traits::Zero::is_zero(x)) {
                return v;
            }
        }
    }

    /// `m` linearly independent vectors of length `n >= m` (and an extra `f0`).
    fn independent(&mut self, m: usize, n: usize) -> (Vec<Rational>, Vec<Vec<Rational>>) {
        loop {
            let basis = self.vectors(m, n);
            let g = gram_matrix(&basis).expect("equal lengths");
            if !num_traits::Zero::is_zero(&crate::linalg::sym_determinant(&g)) {
                return (self.vector(n), basis);
            }
        }
    }

    /// `Gram + I`, always positive definite.
    fn spd(&mut self, order: usize) -> SymMatrix<Rational> {
        let len = self.size(1, order + 1);
        let cols: Vec<Vec<Rational>> = (0..order).map(|_| self.vector(len)).collect();
        gram_matrix(&cols)
            .and_then(|g| g.shifted(&vec![Rational::from_i64(1); order]))
            .expect("square")
    }
}

fn fmt_vecs(v: &[Vec<Rational>]) -> String {
    let rows: Vec<String> = v
        .iter()
        .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
        .collect();
    format!("[{}]", rows.join("; "))
}

fn suite_distance(g: &mut Gen, cfg: &VerifyConfig) -> SuiteReport {
    let mut rep = SuiteReport::new(
        "distance",
        "Gram-determinant ratio equals the normal-equation distance; residual is orthogonal to the basis",
    );
    for _ in 0..cfg.cases {
        let m = g.size(1, cfg.max_order.min(5));
        let n = g.size(m, 8.max(m));
        let (f0, basis) = g.independent(m, n);
        let r = distance_squared(&f0, &basis).and_then(|d| {
            let orth = residual_inner_products(&f0, &basis, &d.minimizer)?;
            Ok(d.d_squared == d.d_squared_normal
                && !d.d_squared.is_negative()
                && orth.iter().all(num_traits::Zero::is_zero))
        });
        rep.record_result(r, || format!("f0={} basis={}", fmt_vecs(&[f0.clone()]), fmt_vecs(&basis)));
    }
    rep
}

fn suite_minimizer(g: &mut Gen, cfg: &VerifyConfig) -> SuiteReport {
    let mut rep = SuiteReport::new(
        "minimizer",
        "cofactor (Cramer) minimizer equals the solution of the normal equations",
    );
    for _ in 0..cfg.cases {
        let m = g.size(1, cfg.max_order.min(5));
        let n = g.size(m, 8.max(m));
        let (f0, basis) = g.independent(m, n);
        let r = (|| {
            let t = minimizer_cramer(&f0, &basis)?;
            let a = gram_matrix(&basis)?;
            let b: Vec<Rational> = basis.iter().map(|fk| dot(fk, &f0)).collect();
            Ok(t == spd_solve(&a, &b)?)
        })();
        rep.record_result(r, || format!("f0={} basis={}", fmt_vecs(&[f0.clone()]), fmt_vecs(&basis)));
    }
    rep
}

fn suite_charpoly(g: &mut Gen, cfg: &VerifyConfig) -> SuiteReport {
    let mut rep = SuiteReport::new(
        "charpoly",
        "det(diag(lambda) + C) equals the principal-minor subset expansion",
    );
    for _ in 0..cfg.cases {
        let n = g.size(1, cfg.max_order.min(8));
        let c = g.matrix(n, n);
        let lambda = LambdaWeights::new((0..n).map(|_| g.int()).collect());
        let r = (|| Ok(gen_charpoly_subset(&c, &lambda)? == gen_charpoly_direct(&c, &lambda)?))();
        rep.record_result(r, || format!("C={} lambda={:?}", fmt_vecs(&c.row_vectors()), lambda.values()));
    }
    rep
}

fn suite_inverse(g: &mut Gen, cfg: &VerifyConfig) -> SuiteReport {
    let mut rep = SuiteReport::new(
        "inverse",
        "subset formula for (diag(lambda) + C)^-1 is an inverse; its quadratic form matches a direct solve",
    );
    for _ in 0..cfg.cases {
        let n = g.size(1, cfg.max_order.min(6));
        let len = g.size(1, n + 1);
        let cols = g.vectors(n, len);
        let a = g.vector(n);
        let lambda = g.weights(n);
        let r = (|| {
            let c = gram_matrix(&cols)?;
            let shifted = c.shifted(lambda.values())?;
            let inv = inverse_lambda(&c, &lambda)?;
            let is_inverse = shifted.matmul(&inv)? == Matrix::identity(n);
            let direct = dot(&spd_solve(&shifted, &a)?, &a);
            Ok(is_inverse && quadform_lambda(&c, &lambda, &a)? == direct)
        })();
        rep.record_result(r, || format!("cols={} a={:?} lambda={:?}", fmt_vecs(&cols), a, lambda.values()));
    }
    rep
}

fn suite_delta(g: &mut Gen, cfg: &VerifyConfig) -> SuiteReport {
    let mut rep = SuiteReport::new(
        "delta",
        "shifted Gram-determinant quotient minus one equals the weighted quadratic form",
    );
    let tol = Tolerance::default();
    for _ in 0..cfg.cases {
        let m = g.size(2, cfg.max_order.clamp(2, 4));
        let n = g.size(1, 6);
        let a = g.matrix(m, n);
        let lambda = LambdaWeights::new((0..n).map(|_| g.square()).collect());
        let r = delta_identity_check(&a, &lambda, &tol).map(|d| d.lhs == d.rhs);
        rep.record_result(r, || format!("A={} lambda={:?}", fmt_vecs(&a.row_vectors()), lambda.values()));
    }
    rep
}

fn suite_cauchy_binet(g: &mut Gen, cfg: &VerifyConfig) -> SuiteReport {
    let mut rep = SuiteReport::new(
        "cauchy-binet",
        "Gram determinant of selected columns equals the sum of squared maximal minors",
    );
    for _ in 0..cfg.cases {
        let m = g.size(1, cfg.max_order.min(4));
        let n = g.size(1, 7);
        let x = g.matrix(m, n);
        let mask = g.0.gen_range(0..(1u64 << n));
        let alpha = SubsetIndex::from_mask(mask);
        let r = cauchy_binet_check(&x, &alpha).map(|c| c.gram_det == c.minor_sum);
        rep.record_result(r, || format!("X={} alpha={alpha}", fmt_vecs(&x.row_vectors())));
    }
    rep
}

fn suite_constrained(g: &mut Gen, cfg: &VerifyConfig) -> SuiteReport {
    let mut rep = SuiteReport::new(
        "constrained-min",
        "(A^-1 b, b)^-1 bounds (Ax, x) on random feasible x; diagonal closed forms agree exactly",
    );
    // each instance tests `feasible_points` points, so fewer instances suffice
    let cases = cfg.cases.min(50.max(cfg.cases / 4));
    for _ in 0..cases {
        let n = g.size(1, cfg.max_order.min(6));
        let a = g.spd(n);
        let b = g.nonzero_vector(n);
        let w: Vec<Rational> = (0..n).map(|_| g.positive()).collect();
        let r = (|| {
            let cm = constrained_min(&a, &b)?;
            let attained = a.quadratic(&cm.argmin)? == cm.value && dot(&cm.argmin, &b) == Rational::from_i64(1);
            let mut bounded = true;
            let mut tried = 0;
            while tried < cfg.feasible_points {
                let y = g.vector(n);
                let s = dot(&y, &b);
                if num_traits::Zero::is_zero(&s) {
                    continue;
                }
                tried += 1;
                let x: Vec<Rational> = y.into_iter().map(|v| v / &s).collect();
                bounded &= cm.value <= a.quadratic(&x)?;
            }

            let ones = vec![Rational::from_i64(1); n];
            let d = SymMatrix::from_upper(n, |i, j| if i == j { w[i].clone() } else { Rational::from_i64(0) });
            let mut diagonal = true;
            for rhs in [&ones, &b] {
                diagonal &= diagonal_constrained_min(&w, rhs)? == constrained_min(&d, rhs)?;
            }
            let inv_sum = w.iter().fold(Rational::from_i64(0), |acc, a| acc + Rational::from_i64(1) / a);
            diagonal &= diagonal_constrained_min(&w, &ones)?.value == Rational::from_i64(1) / inv_sum;
            Ok(attained && bounded && diagonal)
        })();
        rep.record_result(r, || format!("A={} b={b:?} diag={w:?}", fmt_vecs(&a.row_vectors())));
    }
    rep
}

/// Runs every identity suite. Each suite draws from its own ChaCha stream,
/// so results do not depend on suite order.
pub fn run_identity_suites(cfg: &VerifyConfig) -> Result<VerifyReport> {
    if cfg.max_order < 2 {
        return Err(Error::InvalidInput("max_order must be at least 2".into()));
    }
    if cfg.cases == 0 {
        return Err(Error::InvalidInput("cases must be positive".into()));
    }
    type Suite = fn(&mut Gen, &VerifyConfig) -> SuiteReport;
    let suites: [Suite; 7] = [
        suite_distance,
        suite_minimizer,
        suite_charpoly,
        suite_inverse,
        suite_delta,
        suite_cauchy_binet,
        suite_constrained,
    ];
    let reports = suites
        .iter()
        .enumerate()
        .map(|(i, f)| f(&mut Gen::new(cfg.seed, i as u64), cfg))
        .collect();
    Ok(VerifyReport {
        config: *cfg,
        suites: reports,
    })
}
