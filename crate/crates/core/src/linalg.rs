//! Determinants, minors, cofactors, LDLᵀ solves and rank-one determinant
//! updates.
//!
//! The exact backend always uses fraction-free Bareiss elimination. The float
//! backend uses an LDLᵀ factorization for symmetric input and partial-pivot LU
//! otherwise. A float pivot is treated as zero when its magnitude falls below
//! `tol.abs * max(1, max |entry|)`.

use crate::error::{Error, Result};
use crate::matrix::{Matrix, SubsetIndex, SymMatrix};
use crate::scalar::{dot, Scalar, Tolerance};

/// Determinant of a square matrix with the default tolerance.
pub fn determinant<S: Scalar>(m: &Matrix<S>) -> Result<S> {
    determinant_with(m, &Tolerance::default())
}

pub fn determinant_with<S: Scalar>(m: &Matrix<S>, tol: &Tolerance) -> Result<S> {
    m.require_square()?;
    Ok(if S::EXACT {
        bareiss_determinant(m)
    } else {
        lu_determinant(m, tol)
    })
}

/// Determinant of a symmetric matrix: Bareiss (exact) or LDLᵀ with an LU
/// fallback when the matrix is not positive definite (float).
pub fn sym_determinant<S: Scalar>(m: &SymMatrix<S>) -> S {
    sym_determinant_with(m, &Tolerance::default())
}

pub fn sym_determinant_with<S: Scalar>(m: &SymMatrix<S>, tol: &Tolerance) -> S {
    if S::EXACT {
        return bareiss_determinant(m.as_matrix());
    }
    match Ldlt::factor(m, tol) {
        Ok(f) => f.determinant(),
        Err(_) => lu_determinant(m.as_matrix(), tol),
    }
}

/// Fraction-free Gaussian elimination. Every division is exact, so integer
/// input stays integral throughout. Returns 1 for the empty matrix.
pub fn bareiss_determinant<S: Scalar>(m: &Matrix<S>) -> S {
    let n = m.rows();
    debug_assert!(m.is_square());
    if n == 0 {
        return S::one();
    }
    let mut a = m.row_vectors();
    let mut negate = false;
    let mut prev = S::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    negate = !negate;
                }
                None => return S::zero(),
            }
        }
        let pivot = a[k][k].clone();
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (a[i][j].clone() * &pivot - a[i][k].clone() * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = pivot;
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

/// Partial-pivot LU determinant.
pub fn lu_determinant<S: Scalar>(m: &Matrix<S>, tol: &Tolerance) -> S {
    let n = m.rows();
    debug_assert!(m.is_square());
    let scale = m.max_abs();
    let mut a = m.row_vectors();
    let mut det = S::one();
    for k in 0..n {
        let (p, _) = (k..n)
            .map(|i| (i, a[i][k].abs()))
            .fold((k, S::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
        if a[p][k].is_negligible(&scale, tol) {
            return S::zero();
        }
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        let pivot = a[k][k].clone();
        det *= &pivot;
        for i in k + 1..n {
            let factor = a[i][k].clone() / &pivot;
            for j in k + 1..n {
                let v = a[i][j].clone() - factor.clone() * &a[k][j];
                a[i][j] = v;
            }
        }
    }
    det
}

/// Minor on the given row and column subsets.
pub fn minor<S: Scalar>(m: &Matrix<S>, rows: &SubsetIndex, cols: &SubsetIndex) -> Result<S> {
    rows.check_order(m.rows())?;
    cols.check_order(m.cols())?;
    if rows.len() != cols.len() {
        return Err(Error::DimensionMismatch {
            context: "minor subsets",
            expected: rows.len(),
            found: cols.len(),
        });
    }
    determinant(&m.select(rows.indices(), cols.indices())?)
}

/// `(-1)^(r+s)` times the determinant of `m` with row `r` and column `s` removed.
pub fn cofactor<S: Scalar>(m: &Matrix<S>, r: usize, s: usize) -> Result<S> {
    m.require_square()?;
    let d = determinant(&m.without(r, s)?)?;
    Ok(if (r + s) % 2 == 0 { d } else { -d })
}

/// Determinant of the principal submatrix on `subset`; 1 for the empty subset.
pub fn principal_minor<S: Scalar>(m: &Matrix<S>, subset: &SubsetIndex) -> Result<S> {
    m.require_square()?;
    subset.check_order(m.rows())?;
    determinant(&m.select(subset.indices(), subset.indices())?)
}

/// Matrix of first-order cofactors, entry `(r, s)` = `A^r_s`.
pub fn cofactor_matrix<S: Scalar>(m: &Matrix<S>) -> Result<Matrix<S>> {
    let n = m.require_square()?;
    let mut out = Matrix::zeros(n, n);
    for r in 0..n {
        for s in 0..n {
            out.set(r, s, cofactor(m, r, s)?);
        }
    }
    Ok(out)
}

/// Classical adjugate: the transposed cofactor matrix, `m · adj(m) = det(m) I`.
pub fn adjugate<S: Scalar>(m: &Matrix<S>) -> Result<Matrix<S>> {
    Ok(cofactor_matrix(m)?.transpose())
}

/// `C = L D Lᵀ` with unit lower-triangular `L`, computed without square roots.
#[derive(Clone)]
pub struct Ldlt<S> {
    lower: Matrix<S>,
    diag: Vec<S>,
}

impl<S: Scalar> std::fmt::Debug for Ldlt<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Ldlt")
            .field("lower", &self.lower)
            .field("diag", &self.diag)
            .finish()
    }
}

impl<S: Scalar> Ldlt<S> {
    /// Factors an SPD matrix. A negligible pivot is a singularity error, a
    /// negative one a positive-definiteness error.
    pub fn factor(a: &SymMatrix<S>, tol: &Tolerance) -> Result<Self> {
        let n = a.order();
        let scale = a.max_abs();
        let mut lower = Matrix::<S>::identity(n);
        let mut diag: Vec<S> = Vec::with_capacity(n);
        for j in 0..n {
            let mut dj = a[(j, j)].clone();
            for k in 0..j {
                let ljk = lower[(j, k)].clone();
                dj -= &(ljk.clone() * &ljk * &diag[k]);
            }
            if dj.is_negligible(&scale, tol) {
                return Err(Error::Singular {
                    what: format!("matrix (zero pivot at index {j})"),
                });
            }
            if dj.is_negative() {
                return Err(Error::NotPositiveDefinite { pivot: j });
            }
            for i in j + 1..n {
                let mut v = a[(i, j)].clone();
                for k in 0..j {
                    v -= &(lower[(i, k)].clone() * &lower[(j, k)] * &diag[k]);
                }
                lower.set(i, j, v / &dj);
            }
            diag.push(dj);
        }
        Ok(Self { lower, diag })
    }

    pub fn order(&self) -> usize {
        self.diag.len()
    }

    pub fn determinant(&self) -> S {
        let mut d = S::one();
        for v in &self.diag {
            d *= v;
        }
        d
    }

    pub fn solve(&self, b: &[S]) -> Result<Vec<S>> {
        let n = self.order();
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                context: "LDLᵀ solve",
                expected: n,
                found: b.len(),
            });
        }
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                let v = self.lower[(i, k)].clone() * &y[k];
                y[i] -= &v;
            }
        }
        for (yi, di) in y.iter_mut().zip(&self.diag) {
            *yi = yi.clone() / di;
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let v = self.lower[(k, i)].clone() * &y[k];
                y[i] -= &v;
            }
        }
        Ok(y)
    }

    pub fn inverse(&self) -> Result<Matrix<S>> {
        let n = self.order();
        let mut out = Matrix::zeros(n, n);
        for j in 0..n {
            let mut e = vec![S::zero(); n];
            e[j] = S::one();
            for (i, v) in self.solve(&e)?.into_iter().enumerate() {
                out.set(i, j, v);
            }
        }
        Ok(out)
    }

    /// In-place update to the factorization of `L D Lᵀ + c cᵀ`.
    pub fn rank1_update(&mut self, c: &[S]) -> Result<()> {
        let n = self.order();
        if c.len() != n {
            return Err(Error::DimensionMismatch {
                context: "LDLᵀ rank-one update",
                expected: n,
                found: c.len(),
            });
        }
        let mut w = c.to_vec();
        let mut alpha = S::one();
        for j in 0..n {
            let p = w[j].clone();
            let d_old = self.diag[j].clone();
            let d_new = d_old.clone() + alpha.clone() * &p * &p;
            let beta = p.clone() * &alpha / &d_new;
            alpha = alpha * &d_old / &d_new;
            self.diag[j] = d_new;
            for i in j + 1..n {
                let wi = w[i].clone() - p.clone() * &self.lower[(i, j)];
                let lij = self.lower[(i, j)].clone() + beta.clone() * &wi;
                self.lower.set(i, j, lij);
                w[i] = wi;
            }
        }
        Ok(())
    }

    /// Reassembles `L D Lᵀ`.
    pub fn reconstruct(&self) -> Matrix<S> {
        let n = self.order();
        Matrix::from_fn(n, n, |i, j| {
            let mut acc = S::zero();
            for k in 0..=i.min(j) {
                acc += &(self.lower[(i, k)].clone() * &self.lower[(j, k)] * &self.diag[k]);
            }
            acc
        })
    }
}

/// Solves `A t = b` for SPD `A`; exact under rationals.
pub fn spd_solve<S: Scalar>(a: &SymMatrix<S>, b: &[S]) -> Result<Vec<S>> {
    spd_solve_with(a, b, &Tolerance::default())
}

pub fn spd_solve_with<S: Scalar>(a: &SymMatrix<S>, b: &[S], tol: &Tolerance) -> Result<Vec<S>> {
    if b.len() != a.order() {
        return Err(Error::DimensionMismatch {
            context: "spd_solve right-hand side",
            expected: a.order(),
            found: b.len(),
        });
    }
    Ldlt::factor(a, tol)?.solve(b)
}

/// `det(A + c cᵀ) = det(A) · (1 + cᵀ A⁻¹ c)` from a known `det(A)`.
pub fn det_rank1_update<S: Scalar>(det: &S, a: &SymMatrix<S>, c: &[S]) -> Result<S> {
    det_rank1_update_with(det, a, c, &Tolerance::default())
}

pub fn det_rank1_update_with<S: Scalar>(
    det: &S,
    a: &SymMatrix<S>,
    c: &[S],
    tol: &Tolerance,
) -> Result<S> {
    if c.len() != a.order() {
        return Err(Error::DimensionMismatch {
            context: "det_rank1_update vector",
            expected: a.order(),
            found: c.len(),
        });
    }
    if det.is_negligible(&S::one(), tol) {
        return Err(Error::Singular {
            what: "matrix in rank-one determinant update".into(),
        });
    }
    let x = spd_solve_with(a, c, tol)?;
    Ok(det.clone() * (S::one() + dot(c, &x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::gram_matrix;
    use crate::scalar::Rational;
    use proptest::prelude::*;

    fn q(v: i64) -> Rational {
        Rational::from_i64(v)
    }

    fn qm(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_i64_rows(rows).unwrap()
    }

    /// Leibniz formula over all permutations.
    fn leibniz(m: &Matrix<Rational>) -> Rational {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(n - 1) {
                for pos in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(pos, n - 1);
                    out.push(q);
                }
            }
            out
        }
        let n = m.rows();
        let mut total = Rational::from_i64(0);
        for p in perms(n) {
            let inversions = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| p[i] > p[j])
                .count();
            let mut term = Rational::from_i64(1);
            for (i, &pi) in p.iter().enumerate() {
                term *= &m[(i, pi)];
            }
            if inversions % 2 == 1 {
                term = -term;
            }
            total += &term;
        }
        total
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(determinant(&Matrix::<Rational>::identity(3)).unwrap(), q(1));
        assert_eq!(determinant(&qm(&[&[2, 2], &[2, 2]])).unwrap(), q(0));
        assert_eq!(determinant(&qm(&[&[1, 1], &[1, 2]])).unwrap(), q(1));
        assert_eq!(determinant(&Matrix::<Rational>::zeros(0, 0)).unwrap(), q(1));
        assert!(determinant(&Matrix::<Rational>::zeros(2, 3)).is_err());
    }

    #[test]
    fn bareiss_pivots_on_zero_leading_entry() {
        let m = qm(&[&[0, 1, 2], &[1, 0, 3], &[4, -3, 8]]);
        assert_eq!(determinant(&m).unwrap(), leibniz(&m));
        assert_eq!(determinant(&m).unwrap(), q(-2));
    }

    #[test]
    fn float_determinants() {
        let m = Matrix::<f64>::from_i64_rows(&[&[4, 2, 0], &[2, 5, 1], &[0, 1, 3]]).unwrap();
        let sym = SymMatrix::new(m.clone(), &Tolerance::default()).unwrap();
        // 4(15-1) - 2(6-0) = 44
        assert!((determinant(&m).unwrap() - 44.0).abs() < 1e-12);
        assert!((sym_determinant(&sym) - 44.0).abs() < 1e-12);
        let singular = Matrix::<f64>::from_i64_rows(&[&[1, 2], &[2, 4]]).unwrap();
        assert_eq!(determinant(&singular).unwrap(), 0.0);
        let indefinite =
            SymMatrix::new(Matrix::<f64>::from_i64_rows(&[&[0, 1], &[1, 0]]).unwrap(), &Tolerance::default())
                .unwrap();
        assert!((sym_determinant(&indefinite) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn cofactor_examples() {
        let id = Matrix::<Rational>::identity(2);
        assert_eq!(cofactor(&id, 0, 0).unwrap(), q(1));
        assert_eq!(cofactor(&id, 0, 1).unwrap(), q(0));
        assert_eq!(cofactor(&qm(&[&[1, 2], &[3, 4]]), 0, 1).unwrap(), q(-3));
        assert!(matches!(
            cofactor(&id, 2, 0),
            Err(Error::IndexOutOfRange { index: 2, order: 2 })
        ));
    }

    #[test]
    fn principal_minor_examples() {
        let d = qm(&[&[2, 0, 0], &[0, 3, 0], &[0, 0, 5]]);
        let s = SubsetIndex::new(vec![0, 2], 3).unwrap();
        assert_eq!(principal_minor(&d, &s).unwrap(), q(10));
        assert_eq!(principal_minor(&d, &SubsetIndex::empty()).unwrap(), q(1));
        assert_eq!(
            principal_minor(&d, &SubsetIndex::full(3)).unwrap(),
            determinant(&d).unwrap()
        );
        assert!(principal_minor(&d, &SubsetIndex::from_mask(0b1000)).is_err());
    }

    #[test]
    fn spd_solve_examples() {
        let a = SymMatrix::new(qm(&[&[1, 1], &[1, 2]]), &Tolerance::default()).unwrap();
        assert_eq!(spd_solve(&a, &[q(1), q(1)]).unwrap(), vec![q(1), q(0)]);
        let id = SymMatrix::<Rational>::identity(3);
        let b = vec![q(4), q(-2), q(7)];
        assert_eq!(spd_solve(&id, &b).unwrap(), b);
        let singular = SymMatrix::new(qm(&[&[1, 1], &[1, 1]]), &Tolerance::default()).unwrap();
        assert!(matches!(
            spd_solve(&singular, &[q(1), q(1)]),
            Err(Error::Singular { .. })
        ));
        assert!(spd_solve(&id, &[q(1)]).is_err());
    }

    #[test]
    fn rank1_update_examples() {
        let id = SymMatrix::<Rational>::identity(2);
        assert_eq!(det_rank1_update(&q(1), &id, &[q(1), q(0)]).unwrap(), q(2));
        let a = SymMatrix::new(qm(&[&[2, 1], &[1, 3]]), &Tolerance::default()).unwrap();
        assert_eq!(det_rank1_update(&q(5), &a, &[q(0), q(0)]).unwrap(), q(5));
        assert!(det_rank1_update(&q(0), &a, &[q(1), q(0)]).is_err());
    }

    #[test]
    fn ldlt_update_tracks_fresh_factorization() {
        let vs: Vec<Vec<f64>> = vec![
            vec![1.0, 2.0, 0.5, -1.0],
            vec![0.0, 1.0, 3.0, 2.0],
            vec![2.0, -1.0, 1.0, 1.0],
        ];
        let g = gram_matrix(&vs).unwrap();
        let tol = Tolerance::default();
        let mut f = Ldlt::factor(&g, &tol).unwrap();
        let c = vec![0.3, -1.2, 2.5];
        f.rank1_update(&c).unwrap();
        let updated = g.rank1_updated(&c).unwrap();
        assert!(f.reconstruct().approx_eq(updated.as_matrix(), &tol));
        let fresh = Ldlt::factor(&updated, &tol).unwrap();
        assert!(tol.close(f.determinant(), fresh.determinant()));
    }

    fn small_matrix() -> impl Strategy<Value = Matrix<Rational>> {
        (1usize..=4).prop_flat_map(|n| {
            proptest::collection::vec(-6i64..=6, n * n).prop_map(move |v| {
                Matrix::from_fn(n, n, |i, j| Rational::from_i64(v[i * n + j]))
            })
        })
    }

    fn spd_instance() -> impl Strategy<Value = (SymMatrix<Rational>, Vec<Rational>)> {
        (1usize..=5).prop_flat_map(|n| {
            (
                proptest::collection::vec(-5i64..=5, n * (n + 2)),
                proptest::collection::vec(-5i64..=5, n),
            )
                .prop_map(move |(v, c)| {
                    // n + 2 vectors of length n plus identity keeps it SPD
                    let vecs: Vec<Vec<Rational>> = (0..n)
                        .map(|i| (0..n + 2).map(|k| Rational::from_i64(v[i * (n + 2) + k])).collect())
                        .collect();
                    let g = gram_matrix(&vecs).unwrap();
                    let spd = g.shifted(&vec![Rational::from_i64(1); n]).unwrap();
                    (spd, c.into_iter().map(Rational::from_i64).collect())
                })
        })
    }

    proptest! {
        #[test]
        fn bareiss_equals_leibniz(m in small_matrix()) {
            prop_assert_eq!(determinant(&m).unwrap(), leibniz(&m));
        }

        #[test]
        fn cofactor_expansion_along_every_row(m in small_matrix()) {
            let det = determinant(&m).unwrap();
            for r in 0..m.rows() {
                let mut acc = Rational::from_i64(0);
                for s in 0..m.cols() {
                    acc += &(m[(r, s)].clone() * cofactor(&m, r, s).unwrap());
                }
                prop_assert_eq!(&acc, &det);
            }
            let adj = adjugate(&m).unwrap();
            prop_assert_eq!(m.matmul(&adj).unwrap(), Matrix::identity(m.rows()).scale(&det));
        }

        #[test]
        fn gram_is_psd(v in proptest::collection::vec(-9i64..=9, 12), probe in proptest::collection::vec(-9i64..=9, 3)) {
            let vecs: Vec<Vec<Rational>> = v.chunks(4).map(|c| c.iter().map(|&x| Rational::from_i64(x)).collect()).collect();
            let g = gram_matrix(&vecs).unwrap();
            let p: Vec<Rational> = probe.into_iter().map(Rational::from_i64).collect();
            prop_assert!(g.quadratic(&p).unwrap() >= Rational::from_i64(0));
        }

        #[test]
        fn rank1_update_matches_batch((a, c) in spd_instance()) {
            let det = sym_determinant(&a);
            let updated = det_rank1_update(&det, &a, &c).unwrap();
            prop_assert_eq!(updated, sym_determinant(&a.rank1_updated(&c).unwrap()));
        }

        #[test]
        fn spd_solve_residual_is_zero((a, b) in spd_instance()) {
            let t = spd_solve(&a, &b).unwrap();
            prop_assert_eq!(a.mul_vec(&t).unwrap(), b);
        }

        #[test]
        fn float_rank1_update_close_to_batch((a, c) in spd_instance()) {
            let af = SymMatrix::new(a.map(|x| x.to_f64()), &Tolerance::default()).unwrap();
            let cf: Vec<f64> = c.iter().map(|x| x.to_f64()).collect();
            let det = sym_determinant(&af);
            let updated = det_rank1_update(&det, &af, &cf).unwrap();
            let batch = sym_determinant(&af.rank1_updated(&cf).unwrap());
            prop_assert!((updated - batch).abs() <= 1e-10 * batch.abs());
        }

        #[test]
        fn float_spd_determinant_agrees_with_exact(n in 1usize..=12, seed in proptest::collection::vec(-1000i64..=1000, 12 * 14)) {
            let vecs: Vec<Vec<Rational>> = (0..n)
                .map(|i| (0..n + 2).map(|k| Rational::from_i64(seed[i * 14 + k] % 9)).collect())
                .collect();
            let exact = gram_matrix(&vecs).unwrap().shifted(&vec![Rational::from_i64(1); n]).unwrap();
            let float = SymMatrix::new(exact.map(|x| x.to_f64()), &Tolerance::default()).unwrap();
            let de = sym_determinant(&exact).to_f64();
            let df = sym_determinant(&float);
            prop_assert!((de - df).abs() <= 1e-9 * de.abs(), "exact {de} float {df}");
        }
    }
}
