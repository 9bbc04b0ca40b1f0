//! Distance of a vector from the span of a basis, the quadratic form
//! `F(t) = ‖Σ t_k f_k − f_0‖²`, the cofactor form of its minimizer and the
//! constrained minimum of a positive quadratic form.

use crate::error::{Error, Result};
use crate::linalg::{cofactor, spd_solve_with, sym_determinant_with};
use crate::matrix::{gram_matrix, SubsetIndex, SymMatrix};
use crate::scalar::{dot, Scalar, Tolerance};

/// `F(t) = (A t, t) − 2 (t, b) + c`.
#[derive(Clone, Debug)]
pub struct QuadraticForm<S: Scalar> {
    gram: SymMatrix<S>,
    rhs: Vec<S>,
    constant: S,
}

impl<S: Scalar> QuadraticForm<S> {
    pub fn new(gram: SymMatrix<S>, rhs: Vec<S>, constant: S) -> Result<Self> {
        if rhs.len() != gram.order() {
            return Err(Error::DimensionMismatch {
                context: "quadratic form linear term",
                expected: gram.order(),
                found: rhs.len(),
            });
        }
        Ok(Self {
            gram,
            rhs,
            constant,
        })
    }

    /// The form `‖Σ t_k f_k − f_0‖²`: `A = γ(f_1..f_m)`, `b_k = (f_k, f_0)`,
    /// `c = (f_0, f_0)`.
    pub fn from_vectors(f0: &[S], basis: &[Vec<S>]) -> Result<Self> {
        check_lengths(f0, basis)?;
        let gram = gram_matrix(basis)?;
        let rhs = basis.iter().map(|f| dot(f, f0)).collect();
        Self::new(gram, rhs, dot(f0, f0))
    }

    pub fn gram(&self) -> &SymMatrix<S> {
        &self.gram
    }

    pub fn rhs(&self) -> &[S] {
        &self.rhs
    }

    pub fn constant(&self) -> &S {
        &self.constant
    }

    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    pub fn eval(&self, t: &[S]) -> Result<S> {
        eval_form(self, t)
    }
}

pub fn eval_form<S: Scalar>(form: &QuadraticForm<S>, t: &[S]) -> Result<S> {
    if t.len() != form.dim() {
        return Err(Error::DimensionMismatch {
            context: "quadratic form argument",
            expected: form.dim(),
            found: t.len(),
        });
    }
    let at_t = form.gram.quadratic(t)?;
    let tb = dot(t, &form.rhs);
    Ok(at_t - (tb.clone() + tb) + &form.constant)
}

/// Squared distance of `f0` from `span(basis)` with its minimizer.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceResult<S> {
    /// `Γ(f_0, …, f_m) / Γ(f_1, …, f_m)`.
    pub d_squared: S,
    /// `(f_0, f_0) − (A⁻¹ b, b)`, the normal-equation route.
    pub d_squared_normal: S,
    /// `t_0` with `A t_0 = b`.
    pub minimizer: Vec<S>,
    /// `Γ(f_0, f_1, …, f_m)`.
    pub gram_full: S,
    /// `Γ(f_1, …, f_m)`.
    pub gram_basis: S,
}

impl<S: Scalar> DistanceResult<S> {
    pub fn routes_agree(&self, tol: &Tolerance) -> bool {
        self.d_squared.approx_eq(&self.d_squared_normal, tol)
    }
}

pub fn distance_squared<S: Scalar>(f0: &[S], basis: &[Vec<S>]) -> Result<DistanceResult<S>> {
    distance_squared_with(f0, basis, &Tolerance::default())
}

pub fn distance_squared_with<S: Scalar>(
    f0: &[S],
    basis: &[Vec<S>],
    tol: &Tolerance,
) -> Result<DistanceResult<S>> {
    let form = QuadraticForm::from_vectors(f0, basis)?;
    let gram_basis = sym_determinant_with(form.gram(), tol);
    if gram_basis.is_negligible(&form.gram().max_abs(), tol) {
        return Err(dependent_basis_error(basis, tol));
    }
    let full = bordered_gram(f0, basis)?;
    let gram_full = sym_determinant_with(&full, tol);
    let d_squared = gram_full.clone() / &gram_basis;

    let minimizer = spd_solve_with(form.gram(), form.rhs(), tol)?;
    let d_squared_normal = form.constant().clone() - dot(&minimizer, form.rhs());
    if S::EXACT {
        debug_assert_eq!(d_squared, d_squared_normal, "Gram-ratio and normal-equation routes");
    }
    Ok(DistanceResult {
        d_squared,
        d_squared_normal,
        minimizer,
        gram_full,
        gram_basis,
    })
}

/// `B = γ(f_0, f_1, …, f_m)`.
pub fn bordered_gram<S: Scalar>(f0: &[S], basis: &[Vec<S>]) -> Result<SymMatrix<S>> {
    check_lengths(f0, basis)?;
    let mut all = Vec::with_capacity(basis.len() + 1);
    all.push(f0.to_vec());
    all.extend(basis.iter().cloned());
    gram_matrix(&all)
}

/// Minimizer from cofactors of the bordered Gram matrix:
/// `t_k = −A^0_k(B) / A^0_0(B)`.
pub fn minimizer_cramer<S: Scalar>(f0: &[S], basis: &[Vec<S>]) -> Result<Vec<S>> {
    let b = bordered_gram(f0, basis)?;
    minimizer_from_bordered(&b)
}

/// Cramer minimizer read off an already assembled bordered Gram matrix.
pub fn minimizer_from_bordered<S: Scalar>(b: &SymMatrix<S>) -> Result<Vec<S>> {
    let a00 = cofactor(b.as_matrix(), 0, 0)?;
    if a00.is_zero() {
        return Err(Error::Singular {
            what: "basis Gram matrix (cofactor A^0_0 of the bordered Gram matrix is zero)".into(),
        });
    }
    (1..b.order())
        .map(|k| Ok(-cofactor(b.as_matrix(), 0, k)? / &a00))
        .collect()
}

/// `(f_r, f_0 − Σ t_k f_k)` for every basis vector `f_r`.
pub fn residual_inner_products<S: Scalar>(
    f0: &[S],
    basis: &[Vec<S>],
    t: &[S],
) -> Result<Vec<S>> {
    check_lengths(f0, basis)?;
    if t.len() != basis.len() {
        return Err(Error::DimensionMismatch {
            context: "residual coefficients",
            expected: basis.len(),
            found: t.len(),
        });
    }
    let mut h = f0.to_vec();
    for (tk, fk) in t.iter().zip(basis) {
        for (hi, fi) in h.iter_mut().zip(fk) {
            *hi -= &(tk.clone() * fi);
        }
    }
    Ok(basis.iter().map(|fr| dot(fr, &h)).collect())
}

/// Minimum of `(A x, x)` subject to `(x, b) = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstrainedMin<S> {
    pub value: S,
    pub argmin: Vec<S>,
}

/// `min{(Ax, x) : (x, b) = 1} = (A⁻¹b, b)⁻¹`, attained at `A⁻¹b / (A⁻¹b, b)`.
pub fn constrained_min<S: Scalar>(a: &SymMatrix<S>, b: &[S]) -> Result<ConstrainedMin<S>> {
    constrained_min_with(a, b, &Tolerance::default())
}

pub fn constrained_min_with<S: Scalar>(
    a: &SymMatrix<S>,
    b: &[S],
    tol: &Tolerance,
) -> Result<ConstrainedMin<S>> {
    if b.iter().all(|v| v.is_zero()) {
        return Err(Error::InvalidInput(
            "constraint vector b must be nonzero".into(),
        ));
    }
    let x = spd_solve_with(a, b, tol)?;
    let s = dot(&x, b);
    let argmin: Vec<S> = x.into_iter().map(|v| v / &s).collect();
    if S::EXACT {
        debug_assert!(dot(&argmin, b).is_one());
    }
    Ok(ConstrainedMin {
        value: S::one() / s,
        argmin,
    })
}

/// Diagonal closed form: `min{Σ a_k x_k² : Σ b_k x_k = 1} = (Σ b_k²/a_k)⁻¹`
/// with `x_k = (b_k/a_k)(Σ b_k²/a_k)⁻¹`. All-ones `b` gives `(Σ 1/a_k)⁻¹`.
pub fn diagonal_constrained_min<S: Scalar>(weights: &[S], b: &[S]) -> Result<ConstrainedMin<S>> {
    if weights.len() != b.len() {
        return Err(Error::DimensionMismatch {
            context: "diagonal constrained minimum",
            expected: weights.len(),
            found: b.len(),
        });
    }
    if weights.iter().any(|a| !a.is_positive()) {
        return Err(Error::InvalidInput("diagonal weights must be positive".into()));
    }
    if b.iter().all(|v| v.is_zero()) {
        return Err(Error::InvalidInput(
            "constraint vector b must be nonzero".into(),
        ));
    }
    let mut sum = S::zero();
    for (a, bk) in weights.iter().zip(b) {
        sum += &(bk.clone() * bk / a);
    }
    let argmin = weights
        .iter()
        .zip(b)
        .map(|(a, bk)| bk.clone() / a / &sum)
        .collect();
    Ok(ConstrainedMin {
        value: S::one() / sum,
        argmin,
    })
}

fn check_lengths<S: Scalar>(f0: &[S], basis: &[Vec<S>]) -> Result<()> {
    for f in basis {
        if f.len() != f0.len() {
            return Err(Error::DimensionMismatch {
                context: "basis vector length",
                expected: f0.len(),
                found: f.len(),
            });
        }
    }
    Ok(())
}

/// Names the shortest dependent prefix of the basis.
fn dependent_basis_error<S: Scalar>(basis: &[Vec<S>], tol: &Tolerance) -> Error {
    let prefix = (1..=basis.len())
        .find(|&k| {
            let g = gram_matrix(&basis[..k]).expect("lengths already checked");
            sym_determinant_with(&g, tol).is_negligible(&g.max_abs(), tol)
        })
        .unwrap_or(basis.len());
    let subset = SubsetIndex::full(prefix);
    Error::Singular {
        what: format!("basis: vectors {subset} are linearly dependent (zero Gram determinant)"),
    }
}
