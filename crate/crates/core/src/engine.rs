//! Streaming evaluation of Gram-determinant ratios over growing truncations
//! `f_r^{(n)}` of a [`VectorFamily`].
//!
//! Appending column `n+1` changes the bordered Gram matrix by a rank-one term,
//! `B^{(n+1)} = B^{(n)} + c cᵀ` with `c = (f_{0,n+1}, …, f_{m,n+1})`. Each
//! tracked determinant is advanced with the matrix determinant lemma instead of
//! being recomputed: the exact backend keeps the adjugate
//! (`det' = det + cᵀ adj c`), the float backend keeps an LDLᵀ factorization.
//! Both re-anchor against a batch factorization every
//! [`EngineConfig::reanchor_every`] steps.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::VectorFamily;
use crate::linalg::{adjugate, cofactor_matrix, sym_determinant_with, Ldlt};
use crate::matrix::{gram_matrix, Matrix, SymMatrix};
use crate::scalar::{Scalar, Tolerance};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EngineConfig {
    pub tol: Tolerance,
    /// Recompute tracked determinants from scratch every this many steps;
    /// 0 disables re-anchoring.
    pub reanchor_every: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            tol: Tolerance::default(),
            reanchor_every: 64,
        }
    }
}

#[derive(Clone)]
enum Aux<S: Scalar> {
    Adjugate(Matrix<S>),
    Factor(Option<Ldlt<S>>),
}

/// Determinant of a symmetric matrix under rank-one updates.
#[derive(Clone)]
struct DetTracker<S: Scalar> {
    matrix: SymMatrix<S>,
    det: S,
    aux: Aux<S>,
}

impl<S: Scalar> DetTracker<S> {
    fn new(matrix: SymMatrix<S>, tol: &Tolerance) -> Self {
        let det = sym_determinant_with(&matrix, tol);
        let aux = if S::EXACT {
            Aux::Adjugate(adjugate(matrix.as_matrix()).expect("square"))
        } else {
            Aux::Factor(Ldlt::factor(&matrix, tol).ok())
        };
        Self { matrix, det, aux }
    }

    fn update(&mut self, c: &[S], tol: &Tolerance) -> Result<()> {
        let updated = self.matrix.rank1_updated(c)?;
        match &mut self.aux {
            Aux::Adjugate(adj) => {
                let adj_c = adj.mul_vec(c)?;
                let bump = crate::scalar::dot(c, &adj_c);
                let new_det = self.det.clone() + bump;
                if self.det.is_zero() {
                    *adj = adjugate(updated.as_matrix())?;
                } else {
                    let p = adj.rows();
                    let next = Matrix::from_fn(p, p, |i, j| {
                        (adj[(i, j)].clone() * &new_det - adj_c[i].clone() * &adj_c[j]) / &self.det
                    });
                    *adj = next;
                }
                self.det = new_det;
                self.matrix = updated;
            }
            Aux::Factor(Some(f)) => {
                let x = f.solve(c)?;
                self.det = self.det.clone() * (S::one() + crate::scalar::dot(c, &x));
                f.rank1_update(c)?;
                self.matrix = updated;
            }
            Aux::Factor(None) => {
                *self = Self::new(updated, tol);
            }
        }
        Ok(())
    }

    fn reanchor(&mut self, tol: &Tolerance) {
        *self = Self::new(self.matrix.clone(), tol);
    }

    /// Hadamard bound `Π M_ii`, the natural scale of `det M` for a Gram matrix.
    fn scale(&self) -> S {
        let mut p = S::one();
        for i in 0..self.matrix.order() {
            p *= &self.matrix[(i, i)];
        }
        p
    }
}

/// Incremental state of the window `f_r^{(n)}`, `r = 0..m`.
#[derive(Clone)]
pub struct GramState<S: Scalar> {
    n: usize,
    drop: usize,
    shifted: bool,
    gram: SymMatrix<S>,
    full: DetTracker<S>,
    reduced: DetTracker<S>,
    config: EngineConfig,
}

impl<S: Scalar> GramState<S> {
    /// Empty window (`n = 0`) for `m + 1 = rows` vectors. The reduced
    /// determinant omits row `drop`; `shifted` tracks `det(I + γ)` instead of
    /// `det γ`.
    pub fn new(rows: usize, drop: usize, shifted: bool, config: EngineConfig) -> Result<Self> {
        if drop >= rows {
            return Err(Error::IndexOutOfRange {
                index: drop,
                order: rows,
            });
        }
        let gram = SymMatrix::from_upper(rows, |_, _| S::zero());
        let (full_m, reduced_m) = tracked_matrices(&gram, drop, shifted)?;
        Ok(Self {
            n: 0,
            drop,
            shifted,
            full: DetTracker::new(full_m, &config.tol),
            reduced: DetTracker::new(reduced_m, &config.tol),
            gram,
            config,
        })
    }

    pub fn for_family(family: &VectorFamily<S>, drop: usize, config: EngineConfig) -> Result<Self> {
        Self::new(family.row_count(), drop, false, config)
    }

    /// Appends column `n + 1` of `family`.
    pub fn advance(&mut self, family: &VectorFamily<S>) -> Result<()> {
        if family.row_count() != self.gram.order() {
            return Err(Error::DimensionMismatch {
                context: "family rows",
                expected: self.gram.order(),
                found: family.row_count(),
            });
        }
        let c = family.column(self.n + 1)?;
        self.push_column(&c)
    }

    /// Appends an explicit column `(f_{0,n+1}, …, f_{m,n+1})`.
    pub fn push_column(&mut self, c: &[S]) -> Result<()> {
        let tol = self.config.tol;
        let reduced_c: Vec<S> = c
            .iter()
            .enumerate()
            .filter(|&(r, _)| r != self.drop)
            .map(|(_, v)| v.clone())
            .collect();
        self.gram = self.gram.rank1_updated(c)?;
        self.full.update(c, &tol)?;
        self.reduced.update(&reduced_c, &tol)?;
        self.n += 1;
        if self.config.reanchor_every > 0 && self.n % self.config.reanchor_every == 0 {
            self.full.reanchor(&tol);
            self.reduced.reanchor(&tol);
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn drop_index(&self) -> usize {
        self.drop
    }

    pub fn is_shifted(&self) -> bool {
        self.shifted
    }

    /// Bordered Gram matrix `B^{(n)} = γ(f_0^{(n)}, …, f_m^{(n)})` (never shifted).
    pub fn gram(&self) -> &SymMatrix<S> {
        &self.gram
    }

    /// `Γ(f_0^{(n)}, …, f_m^{(n)})`, or `det(I + γ)` when shifted.
    pub fn det_full(&self) -> &S {
        &self.full.det
    }

    /// Same determinant without row `drop`.
    pub fn det_reduced(&self) -> &S {
        &self.reduced.det
    }

    pub fn reduced_is_singular(&self) -> bool {
        self.reduced
            .det
            .is_negligible(&self.reduced.scale(), &self.config.tol)
    }

    pub fn full_is_singular(&self) -> bool {
        self.full.det.is_negligible(&self.full.scale(), &self.config.tol)
    }

    /// `det_full / det_reduced`, `None` while the denominator vanishes.
    pub fn ratio(&self) -> Option<S> {
        (!self.reduced_is_singular()).then(|| self.full.det.clone() / &self.reduced.det)
    }
}

fn tracked_matrices<S: Scalar>(
    gram: &SymMatrix<S>,
    drop: usize,
    shifted: bool,
) -> Result<(SymMatrix<S>, SymMatrix<S>)> {
    let rows = gram.order();
    let keep: Vec<usize> = (0..rows).filter(|&r| r != drop).collect();
    let reduced = SymMatrix::new(gram.select(&keep, &keep)?, &Tolerance::default())?;
    if shifted {
        Ok((
            gram.shifted(&vec![S::one(); rows])?,
            reduced.shifted(&vec![S::one(); rows - 1])?,
        ))
    } else {
        Ok((gram.clone(), reduced))
    }
}

/// Both determinants recomputed from freshly built Gram matrices of the
/// first `n` columns.
pub fn batch_determinants<S: Scalar>(
    family: &VectorFamily<S>,
    n: usize,
    drop: usize,
    shifted: bool,
    tol: &Tolerance,
) -> Result<(S, S)> {
    let gram = gram_matrix(&family.truncations(n)?)?;
    let (full, reduced) = tracked_matrices(&gram, drop, shifted)?;
    Ok((
        sym_determinant_with(&full, tol),
        sym_determinant_with(&reduced, tol),
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioEntry<S> {
    pub n: usize,
    pub ratio: S,
    pub numerator: S,
    pub denominator: S,
    /// `‖t_0^{(n)}‖²` for the minimizer of `‖f_s − Σ_{k≠s} t_k f_k‖`; absent
    /// for shifted series.
    pub t0_norm_sq: Option<S>,
    /// Time since the series started.
    pub elapsed: Duration,
}

impl<S: Scalar> RatioEntry<S> {
    pub fn t0_norm(&self) -> Option<f64> {
        self.t0_norm_sq.as_ref().map(|v| v.to_f64().sqrt())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioSeries<S> {
    pub drop_index: usize,
    pub shifted: bool,
    pub entries: Vec<RatioEntry<S>>,
    /// Values of `n` whose denominator vanished; no entry is emitted for them.
    pub zero_denominator: Vec<usize>,
}

impl<S: Scalar> RatioSeries<S> {
    /// Pairs `(n, n+1)` of consecutive entries with `R_{n+1} < R_n`
    /// (beyond tolerance for floats).
    pub fn monotonicity_violations(&self, tol: &Tolerance) -> Vec<(usize, usize)> {
        self.entries
            .windows(2)
            .filter(|w| !w[0].ratio.le_tol(&w[1].ratio, tol))
            .map(|w| (w[0].n, w[1].n))
            .collect()
    }

    pub fn last(&self) -> Option<&RatioEntry<S>> {
        self.entries.last()
    }

    pub fn at(&self, n: usize) -> Option<&RatioEntry<S>> {
        self.entries.iter().find(|e| e.n == n)
    }
}

fn check_series_args<S: Scalar>(family: &VectorFamily<S>, drop: usize) -> Result<()> {
    if drop > family.m() {
        return Err(Error::InvalidInput(format!(
            "drop index {drop} exceeds m = {}",
            family.m()
        )));
    }
    Ok(())
}

/// `‖t‖²` for `t_k = −A^s_k(B) / A^s_s(B)`, `k ≠ s`.
fn minimizer_norm_sq<S: Scalar>(gram: &SymMatrix<S>, s: usize) -> Result<Option<S>> {
    if gram.order() == 1 {
        return Ok(Some(S::zero()));
    }
    let rows = gram.order();
    let mut cof = Vec::with_capacity(rows);
    for k in 0..rows {
        cof.push(crate::linalg::cofactor(gram.as_matrix(), s, k)?);
    }
    if cof[s].is_zero() {
        return Ok(None);
    }
    let mut acc = S::zero();
    for (k, c) in cof.iter().enumerate() {
        if k != s {
            let t = c.clone() / &cof[s];
            acc += &(t.clone() * t);
        }
    }
    Ok(Some(acc))
}

/// `R_n = Γ(f_0^{(n)}, …, f_m^{(n)}) / Γ(f_0^{(n)}, …, \hat f_s^{(n)}, …, f_m^{(n)})`
/// for `n = m+1 ..= n_max`.
///
/// Entries whose denominator vanishes are skipped and listed in
/// [`RatioSeries::zero_denominator`]. A numerator or denominator still zero at
/// `n_max` (with `n_max > m + 1`) means the rows are linearly dependent and
/// is a degeneracy error.
pub fn ratio_series<S: Scalar>(
    family: &VectorFamily<S>,
    n_max: usize,
    drop: usize,
    config: EngineConfig,
) -> Result<RatioSeries<S>> {
    check_series_args(family, drop)?;
    let start = family.row_count();
    if n_max < start {
        return Err(Error::InvalidInput(format!(
            "n_max = {n_max} must be at least m + 1 = {start}"
        )));
    }
    let mut state = GramState::new(family.row_count(), drop, false, config)?;
    let clock = Instant::now();
    let mut series = RatioSeries {
        drop_index: drop,
        shifted: false,
        entries: Vec::new(),
        zero_denominator: Vec::new(),
    };
    while state.n() < n_max {
        state.advance(family)?;
        if state.n() < start {
            continue;
        }
        match state.ratio() {
            Some(ratio) => series.entries.push(RatioEntry {
                n: state.n(),
                ratio,
                numerator: state.det_full().clone(),
                denominator: state.det_reduced().clone(),
                t0_norm_sq: minimizer_norm_sq(state.gram(), drop)?,
                elapsed: clock.elapsed(),
            }),
            None => series.zero_denominator.push(state.n()),
        }
    }
    if n_max > start && state.reduced_is_singular() {
        return Err(Error::Degenerate(format!(
            "the Gram determinant without row {drop} is zero for every n up to {n_max}; \
             the remaining rows are linearly dependent"
        )));
    }
    if n_max > start && state.full_is_singular() {
        return Err(Error::Degenerate(format!(
            "the Gram determinant of all rows is zero for every n up to {n_max}; \
             the rows are linearly dependent and the ratio vanishes identically"
        )));
    }
    Ok(series)
}

/// `det(I_{m+1} + γ(f_0^{(n)}, …, f_m^{(n)})) / det(I_m + γ(… \hat f_s …))`
/// for `n = 1 ..= n_max`. The denominator is at least 1.
pub fn shifted_ratio_series<S: Scalar>(
    family: &VectorFamily<S>,
    n_max: usize,
    drop: usize,
    config: EngineConfig,
) -> Result<RatioSeries<S>> {
    check_series_args(family, drop)?;
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be positive".into()));
    }
    let mut state = GramState::new(family.row_count(), drop, true, config)?;
    let clock = Instant::now();
    let mut entries = Vec::with_capacity(n_max);
    while state.n() < n_max {
        state.advance(family)?;
        let den = state.det_reduced().clone();
        entries.push(RatioEntry {
            n: state.n(),
            ratio: state.det_full().clone() / &den,
            numerator: state.det_full().clone(),
            denominator: den,
            t0_norm_sq: None,
            elapsed: clock.elapsed(),
        });
    }
    Ok(RatioSeries {
        drop_index: drop,
        shifted: true,
        entries,
        zero_denominator: Vec::new(),
    })
}

/// Which `n` the boundedness monitor inspects.
#[derive(Clone, Debug, PartialEq)]
pub enum Sampling {
    /// Every `k`-th `n` from `m + 1`, plus `n_max`.
    Every(usize),
    /// Powers of two from `m + 1`, plus `n_max`.
    Geometric,
    /// Explicit list.
    At(Vec<usize>),
}

impl Sampling {
    fn points(&self, start: usize, n_max: usize) -> Vec<usize> {
        let mut pts: Vec<usize> = match self {
            Sampling::Every(k) => (start..=n_max).step_by((*k).max(1)).collect(),
            Sampling::Geometric => std::iter::successors(Some(1usize), |p| p.checked_mul(2))
                .take_while(|&p| p <= n_max)
                .filter(|&p| p >= start)
                .collect(),
            Sampling::At(v) => v.iter().copied().filter(|&p| p >= start && p <= n_max).collect(),
        };
        if !matches!(self, Sampling::At(_)) && start <= n_max {
            pts.push(n_max);
        }
        pts.sort_unstable();
        pts.dedup();
        pts
    }
}

/// Cofactor diagnostics at one `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundednessRow<S> {
    pub n: usize,
    /// `t_rr = A^r_r(B)`, `t_rs = −A^r_s(B)` for `r ≠ s`.
    pub table: Matrix<S>,
    /// `None` when `t_00 = Γ(f_1, …, f_m) = 0`.
    pub t0: Option<Vec<S>>,
    pub t0_norm_sq: Option<S>,
    /// Observed `C_s = t_ss / t_00 = Γ(…\hat f_s…) / Γ(f_1, …, f_m)`, `s = 1..m`.
    pub observed_c: Option<Vec<S>>,
    /// `Σ_s observed C_s`, the bound on `‖t_0‖²`.
    pub envelope: Option<S>,
    /// `t_rs² ≤ t_rr t_ss` for every `r < s`.
    pub cauchy_schwarz_ok: bool,
    /// `‖t_0‖² ≤ Σ_s C_s`; vacuously true on singular rows.
    pub envelope_ok: bool,
}

impl<S> BoundednessRow<S> {
    pub fn singular(&self) -> bool {
        self.t0.is_none()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundednessReport<S> {
    pub rows: Vec<BoundednessRow<S>>,
}

impl<S: Scalar> BoundednessReport<S> {
    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(|r| r.cauchy_schwarz_ok && r.envelope_ok)
    }

    pub fn flagged(&self) -> Vec<usize> {
        self.rows.iter().filter(|r| r.singular()).map(|r| r.n).collect()
    }
}

/// Builds the cofactor diagnostics for one bordered Gram matrix.
pub fn boundedness_row<S: Scalar>(n: usize, gram: &SymMatrix<S>, tol: &Tolerance) -> Result<BoundednessRow<S>> {
    let p = gram.order();
    let cof = cofactor_matrix(gram.as_matrix())?;
    let table = Matrix::from_fn(p, p, |r, s| {
        if r == s {
            cof[(r, s)].clone()
        } else {
            -cof[(r, s)].clone()
        }
    });
    let mut cauchy_schwarz_ok = true;
    for r in 0..p {
        for s in r + 1..p {
            let lhs = table[(r, s)].clone() * &table[(r, s)];
            let rhs = table[(r, r)].clone() * &table[(s, s)];
            cauchy_schwarz_ok &= lhs.le_tol(&rhs, tol);
        }
    }
    let t00 = table[(0, 0)].clone();
    let mut diag_scale = S::one();
    for i in 1..p {
        diag_scale *= &gram[(i, i)];
    }
    if t00.is_negligible(&diag_scale, tol) {
        return Ok(BoundednessRow {
            n,
            table,
            t0: None,
            t0_norm_sq: None,
            observed_c: None,
            envelope: None,
            cauchy_schwarz_ok,
            envelope_ok: true,
        });
    }
    let t0: Vec<S> = (1..p).map(|s| table[(0, s)].clone() / &t00).collect();
    let mut norm_sq = S::zero();
    for v in &t0 {
        norm_sq += &(v.clone() * v);
    }
    let observed_c: Vec<S> = (1..p).map(|s| table[(s, s)].clone() / &t00).collect();
    let mut envelope = S::zero();
    for c in &observed_c {
        envelope += c;
    }
    let envelope_ok = norm_sq.le_tol(&envelope, tol);
    Ok(BoundednessRow {
        n,
        table,
        t0: Some(t0),
        t0_norm_sq: Some(norm_sq),
        observed_c: Some(observed_c),
        envelope: Some(envelope),
        cauchy_schwarz_ok,
        envelope_ok,
    })
}

/// Streams the family to `n_max` and records [`BoundednessRow`]s at the
/// sampled `n`. Rows with a singular reduced Gram matrix are flagged and the
/// stream continues.
pub fn boundedness_report<S: Scalar>(
    family: &VectorFamily<S>,
    n_max: usize,
    sampling: &Sampling,
    config: EngineConfig,
) -> Result<BoundednessReport<S>> {
    let start = family.row_count();
    let points = sampling.points(start, n_max);
    let mut state = GramState::new(family.row_count(), 0, false, config)?;
    let mut rows = Vec::with_capacity(points.len());
    for &target in &points {
        while state.n() < target {
            state.advance(family)?;
        }
        rows.push(boundedness_row(target, state.gram(), &config.tol)?);
    }
    Ok(BoundednessReport { rows })
}

/// Partial sums of `Σ_k (Σ_r C_r f_{rk})²` along one coefficient direction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeSample {
    pub coefficients: Vec<f64>,
    /// `(n, Σ_{k≤n} (Σ_r C_r f_{rk})²)` at geometric checkpoints.
    pub partial_sums: Vec<(usize, f64)>,
    /// Least-squares slope of log partial sum against log n over the upper
    /// checkpoints.
    pub growth_exponent: Option<f64>,
    /// Partial sums look bounded over the probed range.
    pub looks_bounded: bool,
    /// Direction chosen as `(1, −t_0)` from the least-squares minimizer.
    pub kernel_candidate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    /// Always true: finitely many entries cannot establish that no
    /// combination of the rows is square-summable.
    pub heuristic: bool,
    pub n_probe: usize,
    pub samples: Vec<ProbeSample>,
}

impl ProbeReport {
    pub fn flagged(&self) -> usize {
        self.samples.iter().filter(|s| s.looks_bounded).count()
    }
}

fn checkpoints(n_probe: usize) -> Vec<usize> {
    let mut pts: Vec<usize> = std::iter::successors(Some(1usize), |p| p.checked_mul(2))
        .take_while(|&p| p <= n_probe)
        .collect();
    if pts.last() != Some(&n_probe) {
        pts.push(n_probe);
    }
    pts
}

/// Growth below this exponent counts as bounded.
const BOUNDED_EXPONENT: f64 = 0.05;

/// Partial sums along one fixed coefficient vector.
pub fn probe_direction<S: Scalar>(
    family: &VectorFamily<S>,
    coefficients: &[f64],
    n_probe: usize,
) -> Result<ProbeSample> {
    if coefficients.len() != family.row_count() {
        return Err(Error::DimensionMismatch {
            context: "probe coefficients",
            expected: family.row_count(),
            found: coefficients.len(),
        });
    }
    let pts = checkpoints(n_probe);
    let mut partial_sums = Vec::with_capacity(pts.len());
    let mut acc = 0.0f64;
    let mut next = 0;
    for k in 1..=n_probe {
        let col = family.column(k)?;
        let v: f64 = col.iter().zip(coefficients).map(|(f, c)| f.to_f64() * c).sum();
        acc += v * v;
        if pts[next] == k {
            partial_sums.push((k, acc));
            next += 1;
        }
    }
    let upper: Vec<(f64, f64)> = partial_sums
        .iter()
        .filter(|&&(n, s)| n * 16 >= n_probe && n >= 2 && s > 0.0)
        .map(|&(n, s)| ((n as f64).ln(), s.ln()))
        .collect();
    let growth_exponent = (upper.len() >= 2).then(|| {
        let len = upper.len() as f64;
        let mx = upper.iter().map(|p| p.0).sum::<f64>() / len;
        let my = upper.iter().map(|p| p.1).sum::<f64>() / len;
        let sxy: f64 = upper.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = upper.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        sxy / sxx
    });
    let total = partial_sums.last().map_or(0.0, |p| p.1);
    let looks_bounded = total <= 1e-12 || growth_exponent.is_some_and(|g| g < BOUNDED_EXPONENT);
    Ok(ProbeSample {
        coefficients: coefficients.to_vec(),
        partial_sums,
        growth_exponent,
        looks_bounded,
        kernel_candidate: false,
    })
}

/// Heuristic evidence that no combination of the rows is square-summable.
///
/// Probes the direction `(1, −t_0^{(n_probe)})` (normalized) that minimizes
/// the partial sum at `n_probe`, then `coeff_samples` seeded random unit
/// directions.
pub fn l2_escape_probe<S: Scalar>(
    family: &VectorFamily<S>,
    coeff_samples: usize,
    n_probe: usize,
    seed: u64,
) -> Result<ProbeReport> {
    if coeff_samples == 0 {
        return Err(Error::InvalidInput("coeff_samples must be at least 1".into()));
    }
    if n_probe == 0 {
        return Err(Error::InvalidInput("n_probe must be positive".into()));
    }
    let rows = family.row_count();
    let mut samples = Vec::with_capacity(coeff_samples + 1);

    if rows > 1 {
        let trunc: Vec<Vec<f64>> = family
            .truncations(n_probe)?
            .into_iter()
            .map(|r| r.iter().map(Scalar::to_f64).collect())
            .collect();
        let gram = gram_matrix(&trunc)?;
        if let Ok(t0) = crate::hyperplane::minimizer_from_bordered(&gram) {
            let mut c = vec![1.0];
            c.extend(t0.iter().map(|v| -v));
            let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm.is_finite() && norm > 0.0 {
                c.iter_mut().for_each(|v| *v /= norm);
                let mut s = probe_direction(family, &c, n_probe)?;
                s.kernel_candidate = true;
                samples.push(s);
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..coeff_samples {
        let mut c: Vec<f64> = (0..rows).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        c.iter_mut().for_each(|v| *v /= norm);
        samples.push(probe_direction(family, &c, n_probe)?);
    }
    Ok(ProbeReport {
        heuristic: true,
        n_probe,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn zero_columns_leave_determinants_unchanged() {
        let t = Matrix::<Rational>::from_i64_rows(&[&[1, 0, 2], &[0, 1, 1]]).unwrap();
        let fam = VectorFamily::padded(t, crate::family::PadRule::Zero, "z").unwrap();
        let mut st = GramState::for_family(&fam, 0, EngineConfig::default()).unwrap();
        for _ in 0..3 {
            st.advance(&fam).unwrap();
        }
        let before = (st.det_full().clone(), st.det_reduced().clone());
        for _ in 0..5 {
            st.advance(&fam).unwrap();
        }
        assert_eq!((st.det_full().clone(), st.det_reduced().clone()), before);
    }

    #[test]
    fn monomial_m1_at_n2() {
        let fam = VectorFamily::<Rational>::monomial(1);
        let mut st = GramState::for_family(&fam, 0, EngineConfig::default()).unwrap();
        st.advance(&fam).unwrap();
        st.advance(&fam).unwrap();
        assert_eq!(st.det_full(), &q(1, 1));
        assert_eq!(st.det_reduced(), &q(5, 1));
        assert_eq!(st.ratio(), Some(q(1, 5)));
    }

    #[test]
    fn csv_horizon_stops_advance() {
        let t = Matrix::<Rational>::from_i64_rows(&[&[1, 2], &[3, 4]]).unwrap();
        let fam = VectorFamily::from_table(t, "t").unwrap();
        let mut st = GramState::for_family(&fam, 0, EngineConfig::default()).unwrap();
        st.advance(&fam).unwrap();
        st.advance(&fam).unwrap();
        assert!(matches!(st.advance(&fam), Err(Error::HorizonExceeded { .. })));
    }

    #[test]
    fn duplicated_row_is_degenerate() {
        let t = Matrix::<Rational>::from_i64_rows(&[&[1, 2, 5, 7], &[1, 2, 5, 7]]).unwrap();
        let fam = VectorFamily::from_table(t, "dup").unwrap();
        assert!(matches!(
            ratio_series(&fam, 4, 0, EngineConfig::default()),
            Err(Error::Degenerate(_))
        ));
        // a single entry cannot show that the determinant stays zero
        let s = ratio_series(&fam, 2, 0, EngineConfig::default()).unwrap();
        assert_eq!(s.entries[0].ratio, q(0, 1));
    }

    #[test]
    fn dependent_reduced_rows_are_degenerate() {
        let t = Matrix::<Rational>::from_i64_rows(&[&[1, 0, 3, 1], &[1, 2, 5, 7], &[2, 4, 10, 14]])
            .unwrap();
        let fam = VectorFamily::from_table(t, "dup").unwrap();
        assert!(matches!(
            ratio_series(&fam, 4, 0, EngineConfig::default()),
            Err(Error::Degenerate(_))
        ));
        // dropping one of the dependent pair frees the denominator, but the
        // numerator still vanishes identically
        let err = ratio_series(&fam, 4, 1, EngineConfig::default()).unwrap_err();
        assert!(err.to_string().contains("all rows"), "{err}");
    }

    #[test]
    fn series_argument_validation() {
        let fam = VectorFamily::<Rational>::monomial(2);
        assert!(ratio_series(&fam, 2, 0, EngineConfig::default()).is_err());
        assert!(ratio_series(&fam, 10, 3, EngineConfig::default()).is_err());
        assert!(shifted_ratio_series(&fam, 0, 0, EngineConfig::default()).is_err());
    }

    #[test]
    fn monomial_m1_series_both_drops() {
        let fam = VectorFamily::<Rational>::monomial(1);
        let s0 = ratio_series(&fam, 3, 0, EngineConfig::default()).unwrap();
        assert_eq!(s0.entries[0].n, 2);
        assert_eq!(s0.entries[0].ratio, q(1, 5));
        assert!(s0.entries[1].ratio >= s0.entries[0].ratio);
        // Γ(f0, f1) / Γ(f0) at n = 2 is 1 / 2
        let s1 = ratio_series(&fam, 3, 1, EngineConfig::default()).unwrap();
        assert_eq!(s1.entries[0].ratio, q(1, 2));
        // t0 = (f1, f0) / (f1, f1) = 3 / 5
        assert_eq!(s0.entries[0].t0_norm_sq, Some(q(9, 25)));
    }

    #[test]
    fn shifted_series_examples() {
        let fam = VectorFamily::<Rational>::monomial(1);
        let s = shifted_ratio_series(&fam, 3, 0, EngineConfig::default()).unwrap();
        assert_eq!(s.entries[0].ratio, q(3, 2));
        let z = VectorFamily::<Rational>::zeros(2);
        let s = shifted_ratio_series(&z, 5, 1, EngineConfig::default()).unwrap();
        assert!(s.entries.iter().all(|e| e.ratio == q(1, 1)));
    }

    #[test]
    fn boundedness_monomial_m1() {
        let fam = VectorFamily::<Rational>::monomial(1);
        let rep = boundedness_report(&fam, 2, &Sampling::At(vec![2]), EngineConfig::default()).unwrap();
        let row = &rep.rows[0];
        assert_eq!(row.t0.as_deref(), Some(&[q(3, 5)][..]));
        assert!(row.cauchy_schwarz_ok && row.envelope_ok);
        // C_1 = Γ(f0) / Γ(f1) = 2 / 5
        assert_eq!(row.envelope, Some(q(2, 5)));
    }

    #[test]
    fn boundedness_flags_singular_reduced_gram() {
        let t = Matrix::<Rational>::from_i64_rows(&[&[1, 2, 3], &[0, 0, 0]]).unwrap();
        let fam = VectorFamily::padded(t, crate::family::PadRule::Zero, "s").unwrap();
        let rep = boundedness_report(&fam, 6, &Sampling::Every(1), EngineConfig::default()).unwrap();
        assert_eq!(rep.flagged(), vec![2, 3, 4, 5, 6]);
        assert!(rep.all_ok());
    }

    #[test]
    fn orthogonal_family_has_fixed_t0_past_horizon() {
        // f0 = 2 e1 + 3 e2, f1 = e1, f2 = e2
        let t = Matrix::<Rational>::from_i64_rows(&[&[2, 3, 0], &[1, 0, 0], &[0, 1, 0]]).unwrap();
        let fam = VectorFamily::padded(t, crate::family::PadRule::Zero, "o").unwrap();
        let rep = boundedness_report(&fam, 12, &Sampling::Every(1), EngineConfig::default()).unwrap();
        for row in &rep.rows {
            assert_eq!(row.t0.as_deref(), Some(&[q(2, 1), q(3, 1)][..]));
        }
    }

    #[test]
    fn sampling_points() {
        assert_eq!(Sampling::Every(3).points(2, 10), vec![2, 5, 8, 10]);
        assert_eq!(Sampling::Geometric.points(3, 20), vec![4, 8, 16, 20]);
        assert_eq!(Sampling::At(vec![1, 5, 50]).points(2, 10), vec![5]);
    }

    #[test]
    fn probe_closed_form_partial_sums() {
        let fam = VectorFamily::<Rational>::monomial(1);
        let s = probe_direction(&fam, &[1.0, 0.0], 64).unwrap();
        for &(n, v) in &s.partial_sums {
            assert_eq!(v, n as f64);
        }
        assert!((s.growth_exponent.unwrap() - 1.0).abs() < 1e-12);
        let s = probe_direction(&fam, &[0.0, 1.0], 64).unwrap();
        for &(n, v) in &s.partial_sums {
            let n = n as f64;
            assert_eq!(v, n * (n + 1.0) * (2.0 * n + 1.0) / 6.0);
        }
        assert!(!s.looks_bounded);
    }

    #[test]
    fn probe_finite_support_looks_bounded() {
        let t = Matrix::<f64>::from_i64_rows(&[&[1, 2, 3], &[3, 1, 0]]).unwrap();
        let fam = VectorFamily::padded(t, crate::family::PadRule::Zero, "finite").unwrap();
        let rep = l2_escape_probe(&fam, 3, 128, 7).unwrap();
        assert!(rep.heuristic);
        assert!(rep.samples[0].kernel_candidate);
        assert_eq!(rep.flagged(), rep.samples.len());
        let mono = VectorFamily::<f64>::monomial(2);
        let rep = l2_escape_probe(&mono, 5, 256, 7).unwrap();
        assert_eq!(rep.flagged(), 0, "{rep:?}");
        assert!(l2_escape_probe(&mono, 0, 16, 7).is_err());
    }

    #[test]
    fn probe_is_deterministic_in_seed() {
        let fam = VectorFamily::<f64>::monomial(2);
        assert_eq!(l2_escape_probe(&fam, 4, 50, 11).unwrap(), l2_escape_probe(&fam, 4, 50, 11).unwrap());
    }
}
