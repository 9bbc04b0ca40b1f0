//! The generalized characteristic polynomial `P_C(λ) = det(diag(λ) + C)`,
//! its principal-minor expansions, the subset formulas for `C(λ)⁻¹` and
//! `(C(λ)⁻¹ a, a)`, the shifted Gram ratio `Δ(y_1, …, y_m)` and the
//! Cauchy–Binet identity for Gram determinants.
//!
//! Subset expansions have `2ⁿ` terms and refuse orders above
//! [`SUBSET_CAP`].

use crate::error::{Error, Result};
use crate::linalg::{adjugate, determinant, minor, principal_minor, sym_determinant};
use crate::matrix::{gram_matrix, Matrix, SubsetIndex, SymMatrix};
use crate::scalar::{dot, Scalar, Tolerance};

/// Largest order accepted by the subset expansions.
pub const SUBSET_CAP: usize = 20;

/// Diagonal weights `λ = (λ_1, …, λ_n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaWeights<S>(Vec<S>);

impl<S: Scalar> LambdaWeights<S> {
    pub fn new(values: Vec<S>) -> Self {
        Self(values)
    }

    /// Weights that must all be strictly positive.
    pub fn positive(values: Vec<S>) -> Result<Self> {
        let w = Self(values);
        w.require_positive()?;
        Ok(w)
    }

    pub fn from_i64(values: &[i64]) -> Self {
        Self(values.iter().map(|&v| S::from_i64(v)).collect())
    }

    pub fn values(&self) -> &[S] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn product(&self) -> S {
        SubsetIndex::full(self.len()).weight(&self.0)
    }

    fn require_positive(&self) -> Result<()> {
        match self.0.iter().position(|v| !v.is_positive()) {
            None => Ok(()),
            Some(k) => Err(Error::InvalidInput(format!(
                "lambda_{k} = {} must be strictly positive",
                self.0[k]
            ))),
        }
    }

    fn require_len(&self, n: usize) -> Result<()> {
        if self.len() == n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                context: "lambda weights",
                expected: n,
                found: self.len(),
            })
        }
    }
}

fn check_cap(order: usize, cap: usize) -> Result<()> {
    if order > cap {
        Err(Error::CapacityExceeded { order, cap })
    } else {
        Ok(())
    }
}

/// `det(diag(λ) + C)`.
pub fn gen_charpoly_direct<S: Scalar>(c: &Matrix<S>, lambda: &LambdaWeights<S>) -> Result<S> {
    let n = c.require_square()?;
    lambda.require_len(n)?;
    let shifted = Matrix::diagonal(lambda.values()).add(c)?;
    determinant(&shifted)
}

/// `Σ_α λ_α A^α_α(C)` over every subset `α`, where `A^α_α(C)` is the
/// principal minor on the complement of `α` (`λ_∅ = 1`, `A^∅_∅ = det C`).
pub fn gen_charpoly_subset<S: Scalar>(c: &Matrix<S>, lambda: &LambdaWeights<S>) -> Result<S> {
    gen_charpoly_subset_with_cap(c, lambda, SUBSET_CAP)
}

pub fn gen_charpoly_subset_with_cap<S: Scalar>(
    c: &Matrix<S>,
    lambda: &LambdaWeights<S>,
    cap: usize,
) -> Result<S> {
    let n = c.require_square()?;
    lambda.require_len(n)?;
    check_cap(n, cap)?;
    let mut total = S::zero();
    for alpha in SubsetIndex::all(n) {
        let weight = alpha.weight(lambda.values());
        if weight.is_zero() {
            continue;
        }
        let cofactor = principal_minor(c, &alpha.complement(n))?;
        total += &(weight * cofactor);
    }
    Ok(total)
}

/// `(Π λ_k) Σ_α M^α_α(C) / λ_α`; requires nonzero weights.
pub fn gen_charpoly_minor_expansion<S: Scalar>(
    c: &Matrix<S>,
    lambda: &LambdaWeights<S>,
) -> Result<S> {
    let n = c.require_square()?;
    lambda.require_len(n)?;
    check_cap(n, SUBSET_CAP)?;
    if lambda.values().iter().any(|v| v.is_zero()) {
        return Err(Error::InvalidInput(
            "minor expansion divides by lambda and needs nonzero weights".into(),
        ));
    }
    let mut total = S::zero();
    for alpha in SubsetIndex::all(n) {
        total += &(principal_minor(c, &alpha)? / alpha.weight(lambda.values()));
    }
    Ok(lambda.product() * total)
}

/// Adds `weight * block` into `out` at rows and columns `subset`.
fn embed<S: Scalar>(block: &Matrix<S>, subset: &SubsetIndex, out: &mut Matrix<S>, weight: &S) {
    let idx = subset.indices();
    for (i, &gi) in idx.iter().enumerate() {
        for (j, &gj) in idx.iter().enumerate() {
            *out.entry_mut(gi, gj) += &(block[(i, j)].clone() * weight);
        }
    }
}

/// `C(λ)⁻¹ = (Π λ_k / P_C(λ)) Σ_{α≠∅} A(C_α) / λ_α`, with `A(C_α)` the
/// first-order cofactor matrix of the principal submatrix `C_α` placed back
/// at rows and columns `α`.
pub fn inverse_lambda<S: Scalar>(c: &SymMatrix<S>, lambda: &LambdaWeights<S>) -> Result<Matrix<S>> {
    let n = c.order();
    lambda.require_len(n)?;
    lambda.require_positive()?;
    check_cap(n, SUBSET_CAP)?;
    let p = gen_charpoly_direct(c.as_matrix(), lambda)?;
    let prod = lambda.product();
    let mut acc = Matrix::zeros(n, n);
    for alpha in SubsetIndex::all(n).skip(1) {
        let sub = c.principal(&alpha)?;
        let weight = prod.clone() / alpha.weight(lambda.values());
        embed(&adjugate(sub.as_matrix())?, &alpha, &mut acc, &weight);
    }
    Ok(acc.scale(&(S::one() / p)))
}

/// `(C(λ)⁻¹ a, a) = (Π λ_k / P_C(λ)) Σ_{α≠∅} (A(C_α) a_α, a_α) / λ_α`.
pub fn quadform_lambda<S: Scalar>(
    c: &SymMatrix<S>,
    lambda: &LambdaWeights<S>,
    a: &[S],
) -> Result<S> {
    let n = c.order();
    lambda.require_len(n)?;
    lambda.require_positive()?;
    check_cap(n, SUBSET_CAP)?;
    if a.len() != n {
        return Err(Error::DimensionMismatch {
            context: "quadform_lambda vector",
            expected: n,
            found: a.len(),
        });
    }
    let p = gen_charpoly_direct(c.as_matrix(), lambda)?;
    let prod = lambda.product();
    let mut total = S::zero();
    for alpha in SubsetIndex::all(n).skip(1) {
        let a_alpha: Vec<S> = alpha.indices().iter().map(|&i| a[i].clone()).collect();
        if a_alpha.iter().all(|v| v.is_zero()) {
            continue;
        }
        let adj = adjugate(c.principal(&alpha)?.as_matrix())?;
        let term = dot(&adj.mul_vec(&a_alpha)?, &a_alpha);
        total += &(term * &prod / alpha.weight(lambda.values()));
    }
    Ok(total / p)
}

/// Vectors `y_r = (a_{rk} / √λ_k)_k` built from the rows of `A_{mn}`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaRatioInput<S> {
    rows: Vec<Vec<S>>,
}

impl<S: Scalar> DeltaRatioInput<S> {
    /// Exact mode needs every `λ_k` to be a perfect square of a rational.
    pub fn from_matrix(a: &Matrix<S>, lambda: &LambdaWeights<S>) -> Result<Self> {
        lambda.require_len(a.cols())?;
        lambda.require_positive()?;
        let roots = lambda
            .values()
            .iter()
            .enumerate()
            .map(|(k, l)| {
                l.checked_sqrt().ok_or_else(|| Error::Unsupported {
                    mode: S::MODE.as_str(),
                    what: format!("lambda_{k} = {l} has no square root in this backend"),
                })
            })
            .collect::<Result<Vec<S>>>()?;
        let rows = (0..a.rows())
            .map(|r| {
                a.row(r)
                    .iter()
                    .zip(&roots)
                    .map(|(v, s)| v.clone() / s)
                    .collect()
            })
            .collect();
        Ok(Self { rows })
    }

    /// Uses the given vectors as `y_1, …, y_m` directly.
    pub fn from_vectors(rows: Vec<Vec<S>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidInput("delta ratio needs m >= 1 vectors".into()));
        }
        let len = rows[0].len();
        if let Some(bad) = rows.iter().find(|r| r.len() != len) {
            return Err(Error::DimensionMismatch {
                context: "delta ratio vectors",
                expected: len,
                found: bad.len(),
            });
        }
        Ok(Self { rows })
    }

    pub fn vectors(&self) -> &[Vec<S>] {
        &self.rows
    }
}

fn shifted_gram_det<S: Scalar>(vectors: &[Vec<S>]) -> Result<S> {
    if vectors.is_empty() {
        return Ok(S::one());
    }
    let g = gram_matrix(vectors)?;
    Ok(sym_determinant(&g.shifted(&vec![S::one(); vectors.len()])?))
}

/// `det(I_m + γ(y_1..y_m)) / det(I_{m−1} + γ(y_2..y_m)) − 1`.
pub fn delta_ratio<S: Scalar>(y: &DeltaRatioInput<S>) -> Result<S> {
    let v = y.vectors();
    let num = shifted_gram_det(v)?;
    let den = shifted_gram_det(&v[1..])?;
    Ok(num / den - S::one())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaIdentity<S> {
    /// `(C(λ)⁻¹ a, a)` by the subset formula.
    pub lhs: S,
    /// `Δ(y_1, …, y_m)`.
    pub rhs: S,
    pub equal: bool,
}

/// Checks `(C(λ)⁻¹ a, a) = Δ(y_1, …, y_m)` where `a` is the first row of
/// `A`, `C = γ(g_1, …, g_n)` for the columns `g_k` of rows `2..m`, and
/// `y_r = (a_{rk} / √λ_k)`.
pub fn delta_identity_check<S: Scalar>(
    a: &Matrix<S>,
    lambda: &LambdaWeights<S>,
    tol: &Tolerance,
) -> Result<DeltaIdentity<S>> {
    if a.rows() < 2 {
        return Err(Error::InvalidInput(
            "delta identity needs m >= 2 rows (a first row plus g-rows)".into(),
        ));
    }
    let g_rows: Vec<usize> = (1..a.rows()).collect();
    let all_cols: Vec<usize> = (0..a.cols()).collect();
    let g = a.select(&g_rows, &all_cols)?;
    let c = gram_matrix(&g.column_vectors())?;
    let lhs = quadform_lambda(&c, lambda, a.row(0))?;
    let rhs = delta_ratio(&DeltaRatioInput::from_matrix(a, lambda)?)?;
    let equal = lhs.approx_eq(&rhs, tol);
    Ok(DeltaIdentity { lhs, rhs, equal })
}

/// The three expressions of `det(Σ λ_k E_kk + γ(x_1, …, x_n))`.
#[derive(Clone, Debug, PartialEq)]
pub struct GramCharpolyExpansion<S> {
    pub direct: S,
    /// `Π λ_k (1 + Σ_{α≠∅} Γ(x_α) / λ_α)`.
    pub gram_sum: S,
    /// `Π λ_k (1 + Σ_{α≠∅} Σ_β M^α_β(X)² / λ_α)`.
    pub squared_minor_sum: S,
}

impl<S: Scalar> GramCharpolyExpansion<S> {
    pub fn all_equal(&self, tol: &Tolerance) -> bool {
        self.direct.approx_eq(&self.gram_sum, tol)
            && self.direct.approx_eq(&self.squared_minor_sum, tol)
    }
}

/// Evaluates the direct determinant, the Gram-determinant expansion and the
/// squared-minor expansion for the columns `x_k` of `X`.
pub fn gram_charpoly_expansion<S: Scalar>(
    x: &Matrix<S>,
    lambda: &LambdaWeights<S>,
) -> Result<GramCharpolyExpansion<S>> {
    let n = x.cols();
    lambda.require_len(n)?;
    lambda.require_positive()?;
    check_cap(n, SUBSET_CAP)?;
    let cols = x.column_vectors();
    let c = gram_matrix(&cols)?;
    let direct = gen_charpoly_direct(c.as_matrix(), lambda)?;
    let prod = lambda.product();

    let mut gram_terms = S::one();
    let mut minor_terms = S::one();
    for alpha in SubsetIndex::all(n).skip(1) {
        let w = alpha.weight(lambda.values());
        let picked: Vec<Vec<S>> = alpha.indices().iter().map(|&k| cols[k].clone()).collect();
        gram_terms += &(sym_determinant(&gram_matrix(&picked)?) / &w);
        let cb = cauchy_binet_check(x, &alpha)?;
        minor_terms += &(cb.minor_sum / w);
    }
    Ok(GramCharpolyExpansion {
        direct,
        gram_sum: prod.clone() * gram_terms,
        squared_minor_sum: prod * minor_terms,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CauchyBinet<S> {
    /// `Γ(x_{i_1}, …, x_{i_r})` for the selected columns.
    pub gram_det: S,
    /// `Σ_β M^β_α(X)²` over all `r`-subsets `β` of rows.
    pub minor_sum: S,
}

/// Gram determinant of the columns `α` of `X` and the sum of squared `r×r`
/// minors on those columns. Returns `(0, 0)` when `|α|` exceeds the row count.
pub fn cauchy_binet_check<S: Scalar>(x: &Matrix<S>, alpha: &SubsetIndex) -> Result<CauchyBinet<S>> {
    alpha.check_order(x.cols())?;
    let r = alpha.len();
    let m = x.rows();
    if r > m {
        return Ok(CauchyBinet {
            gram_det: S::zero(),
            minor_sum: S::zero(),
        });
    }
    let picked: Vec<Vec<S>> = alpha.indices().iter().map(|&k| x.column(k)).collect();
    let gram_det = if picked.is_empty() {
        S::one()
    } else {
        sym_determinant(&gram_matrix(&picked)?)
    };
    let mut minor_sum = S::zero();
    for beta in SubsetIndex::combinations(m, r) {
        let d = minor(x, &beta, alpha)?;
        minor_sum += &(d.clone() * d);
    }
    Ok(CauchyBinet {
        gram_det,
        minor_sum,
    })
}

/// `det(XᵀX)` and `det(XXᵀ)` for square `X`.
pub fn square_transpose_det_check<S: Scalar>(x: &Matrix<S>) -> Result<(S, S)> {
    x.require_square()?;
    let xt = x.transpose();
    let cols = determinant(&xt.matmul(x)?)?;
    let rows = determinant(&x.matmul(&xt)?)?;
    Ok((cols, rows))
}
