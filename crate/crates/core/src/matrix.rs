//! Dense rectangular and symmetric matrices, subset indices and Gram matrices.

use std::fmt;
use std::ops::{Deref, Index};

use crate::error::{Error, Result};
use crate::scalar::{dot, Scalar, Tolerance};

/// Dense row-major matrix with fixed dimensions.
#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn diagonal(values: &[S]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i].clone() } else { S::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let n_rows = rows.len();
        let mut data = Vec::with_capacity(n_rows * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    context: "matrix row",
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self {
            rows: n_rows,
            cols,
            data,
        })
    }

    /// Convenience constructor from small integers.
    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| S::from_i64(v)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&S> {
        (i < self.rows && j < self.cols).then(|| &self.data[i * self.cols + j])
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, v: S) {
        let c = self.cols;
        self.data[i * c + j] = v;
    }

    pub(crate) fn entry_mut(&mut self, i: usize, j: usize) -> &mut S {
        let c = self.cols;
        &mut self.data[i * c + j]
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row_vectors(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column_vectors(&self) -> Vec<Vec<S>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn matmul(&self, other: &Matrix<S>) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                context: "matrix product",
                expected: self.cols,
                found: other.rows,
            });
        }
        let cols: Vec<Vec<S>> = other.column_vectors();
        Ok(Self::from_fn(self.rows, other.cols, |i, j| {
            dot(self.row(i), &cols[j])
        }))
    }

    pub fn mul_vec(&self, v: &[S]) -> Result<Vec<S>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                context: "matrix-vector product",
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    pub fn add(&self, other: &Matrix<S>) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                context: "matrix sum",
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() + b)
                .collect(),
        })
    }

    pub fn scale(&self, factor: &S) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.clone() * factor).collect(),
        }
    }

    /// Submatrix on the given row and column index lists (in the given order).
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        for &r in rows {
            self.check_row(r)?;
        }
        for &c in cols {
            self.check_col(c)?;
        }
        Ok(Self::from_fn(rows.len(), cols.len(), |i, j| {
            self[(rows[i], cols[j])].clone()
        }))
    }

    /// The matrix with row `r` and column `s` removed.
    pub fn without(&self, r: usize, s: usize) -> Result<Self> {
        self.check_row(r)?;
        self.check_col(s)?;
        let rows: Vec<usize> = (0..self.rows).filter(|&i| i != r).collect();
        let cols: Vec<usize> = (0..self.cols).filter(|&j| j != s).collect();
        self.select(&rows, &cols)
    }

    pub fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    /// Largest entry magnitude, as a scale for float singularity tests.
    pub fn max_abs(&self) -> S {
        let mut m = S::zero();
        for v in &self.data {
            let a = v.abs();
            if a > m {
                m = a;
            }
        }
        m
    }

    pub fn approx_eq(&self, other: &Matrix<S>, tol: &Tolerance) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.approx_eq(b, tol))
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    fn check_row(&self, r: usize) -> Result<()> {
        if r < self.rows {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: r,
                order: self.rows,
            })
        }
    }

    fn check_col(&self, c: usize) -> Result<()> {
        if c < self.cols {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: c,
                order: self.cols,
            })
        }
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;

    fn index(&self, (i, j): (usize, usize)) -> &S {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds for {}x{} matrix",
            self.rows,
            self.cols
        );
        &self.data[i * self.cols + j]
    }
}

impl<S: fmt::Debug> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{:?} ", self.data[i * self.cols + j])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Square matrix with `entry(i, j) == entry(j, i)`.
///
/// Symmetry is checked exactly for rationals and within tolerance for floats.
#[derive(Clone, PartialEq)]
pub struct SymMatrix<S>(Matrix<S>);

impl<S: Scalar> SymMatrix<S> {
    pub fn new(m: Matrix<S>, tol: &Tolerance) -> Result<Self> {
        let n = m.require_square()?;
        for i in 0..n {
            for j in i + 1..n {
                if !m[(i, j)].approx_eq(&m[(j, i)], tol) {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(Self(m))
    }

    /// Builds from the upper triangle; `f(i, j)` is only called with `i <= j`.
    pub fn from_upper(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                if i != j {
                    m.set(j, i, v.clone());
                }
                m.set(i, j, v);
            }
        }
        Self(m)
    }

    pub fn identity(n: usize) -> Self {
        Self(Matrix::identity(n))
    }

    pub fn order(&self) -> usize {
        self.0.rows()
    }

    pub fn as_matrix(&self) -> &Matrix<S> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix<S> {
        self.0
    }

    /// Principal submatrix on `subset`.
    pub fn principal(&self, subset: &SubsetIndex) -> Result<SymMatrix<S>> {
        subset.check_order(self.order())?;
        Ok(Self(self.0.select(subset.indices(), subset.indices())?))
    }

    /// `diag(shift) + self`.
    pub fn shifted(&self, shift: &[S]) -> Result<SymMatrix<S>> {
        if shift.len() != self.order() {
            return Err(Error::DimensionMismatch {
                context: "diagonal shift",
                expected: self.order(),
                found: shift.len(),
            });
        }
        let mut m = self.0.clone();
        for (k, s) in shift.iter().enumerate() {
            *m.entry_mut(k, k) += s;
        }
        Ok(Self(m))
    }

    /// `self + c c^T`.
    pub fn rank1_updated(&self, c: &[S]) -> Result<SymMatrix<S>> {
        if c.len() != self.order() {
            return Err(Error::DimensionMismatch {
                context: "rank-one update",
                expected: self.order(),
                found: c.len(),
            });
        }
        let mut m = self.0.clone();
        for i in 0..c.len() {
            for j in 0..c.len() {
                *m.entry_mut(i, j) += &(c[i].clone() * &c[j]);
            }
        }
        Ok(Self(m))
    }

    /// `(C v, v)`.
    pub fn quadratic(&self, v: &[S]) -> Result<S> {
        let cv = self.0.mul_vec(v)?;
        Ok(dot(&cv, v))
    }
}

impl<S> Deref for SymMatrix<S> {
    type Target = Matrix<S>;

    fn deref(&self) -> &Matrix<S> {
        &self.0
    }
}

impl<S: fmt::Debug> fmt::Debug for SymMatrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sym{:?}", self.0)
    }
}

/// Strictly increasing list of zero-based indices selecting a principal
/// submatrix, a minor or a set of columns.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetIndex(Vec<usize>);

impl SubsetIndex {
    pub fn new(indices: Vec<usize>, order: usize) -> Result<Self> {
        let s = Self(indices);
        s.check_order(order)?;
        Ok(s)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn full(order: usize) -> Self {
        Self((0..order).collect())
    }

    /// Subset whose members are the set bits of `mask`.
    pub fn from_mask(mask: u64) -> Self {
        Self((0..64).filter(|&k| mask & (1u64 << k) != 0).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Indices in `0..order` not in `self`.
    pub fn complement(&self, order: usize) -> SubsetIndex {
        Self((0..order).filter(|k| !self.0.contains(k)).collect())
    }

    pub fn check_order(&self, order: usize) -> Result<()> {
        let increasing = self.0.windows(2).all(|w| w[0] < w[1]);
        let in_range = self.0.last().is_none_or(|&l| l < order);
        if increasing && in_range {
            Ok(())
        } else {
            Err(Error::InvalidSubset {
                indices: self.0.clone(),
                order,
            })
        }
    }

    /// Product of `weights[i]` over members (1 for the empty subset).
    pub fn weight<S: Scalar>(&self, weights: &[S]) -> S {
        let mut p = S::one();
        for &i in &self.0 {
            p *= &weights[i];
        }
        p
    }

    /// Every subset of `0..order` in increasing bit-mask order, starting
    /// with the empty set.
    pub fn all(order: usize) -> impl Iterator<Item = SubsetIndex> {
        assert!(order < 64, "subset enumeration limited to order < 64");
        (0u64..(1u64 << order)).map(SubsetIndex::from_mask)
    }

    /// All `r`-element subsets of `0..order` in lexicographic order.
    pub fn combinations(order: usize, r: usize) -> impl Iterator<Item = SubsetIndex> {
        itertools::Itertools::combinations(0..order, r).map(SubsetIndex)
    }
}

impl fmt::Display for SubsetIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// Gram matrix `γ(x_1, …, x_m)` with entries `(x_k, x_r)`.
pub fn gram_matrix<S: Scalar>(vectors: &[Vec<S>]) -> Result<SymMatrix<S>> {
    let first = vectors
        .first()
        .ok_or_else(|| Error::InvalidInput("gram_matrix needs at least one vector".into()))?;
    let len = first.len();
    for v in vectors {
        if v.len() != len {
            return Err(Error::DimensionMismatch {
                context: "gram vectors",
                expected: len,
                found: v.len(),
            });
        }
    }
    Ok(SymMatrix::from_upper(vectors.len(), |i, j| {
        dot(&vectors[i], &vectors[j])
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn r(v: i64) -> Rational {
        Rational::from_i64(v)
    }

    fn rv(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| r(x)).collect()
    }

    #[test]
    fn gram_of_orthonormal_is_identity() {
        let g = gram_matrix(&[rv(&[1, 0]), rv(&[0, 1])]).unwrap();
        assert_eq!(g.as_matrix(), &Matrix::identity(2));
    }

    #[test]
    fn gram_of_duplicated_vector() {
        let g = gram_matrix(&[rv(&[1, 1]), rv(&[1, 1])]).unwrap();
        assert_eq!(g.as_matrix(), &Matrix::from_i64_rows(&[&[2, 2], &[2, 2]]).unwrap());
    }

    #[test]
    fn gram_matches_inner_product_oracle() {
        let g = gram_matrix(&[rv(&[1, 0]), rv(&[1, 1])]).unwrap();
        assert_eq!(g.as_matrix(), &Matrix::from_i64_rows(&[&[1, 1], &[1, 2]]).unwrap());
    }

    #[test]
    fn gram_dimension_mismatch_reports_lengths() {
        let err = gram_matrix(&[rv(&[1, 0]), rv(&[1])]).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                context: "gram vectors",
                expected: 2,
                found: 1
            }
        );
        assert!(gram_matrix::<Rational>(&[]).is_err());
    }

    #[test]
    fn subset_validation() {
        assert!(SubsetIndex::new(vec![0, 2], 3).is_ok());
        assert!(SubsetIndex::new(vec![2, 0], 3).is_err());
        assert!(SubsetIndex::new(vec![1, 1], 3).is_err());
        assert!(SubsetIndex::new(vec![3], 3).is_err());
        assert!(SubsetIndex::new(vec![], 0).is_ok());
        assert_eq!(SubsetIndex::all(3).count(), 8);
        assert_eq!(SubsetIndex::combinations(5, 2).count(), 10);
        assert_eq!(
            SubsetIndex::new(vec![1], 3).unwrap().complement(3),
            SubsetIndex::new(vec![0, 2], 3).unwrap()
        );
    }

    #[test]
    fn symmetric_constructor_rejects_asymmetry() {
        let m = Matrix::<Rational>::from_i64_rows(&[&[1, 2], &[3, 4]]).unwrap();
        assert_eq!(
            SymMatrix::new(m, &Tolerance::default()).unwrap_err(),
            Error::NotSymmetric { row: 0, col: 1 }
        );
        let ragged = Matrix::<Rational>::from_rows(vec![rv(&[1, 2]), rv(&[1])]);
        assert!(ragged.is_err());
    }

    #[test]
    fn select_and_without() {
        let m = Matrix::<Rational>::from_i64_rows(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]).unwrap();
        let w = m.without(1, 0).unwrap();
        assert_eq!(w, Matrix::from_i64_rows(&[&[2, 3], &[8, 9]]).unwrap());
        assert!(m.without(3, 0).is_err());
        assert!(m.get(3, 3).is_none());
    }

    #[test]
    #[should_panic]
    fn out_of_bounds_index_panics() {
        let m = Matrix::<f64>::zeros(2, 2);
        let _ = m[(2, 0)];
    }
}
