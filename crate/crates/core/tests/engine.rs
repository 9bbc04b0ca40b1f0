use gramheight::engine::{
    batch_determinants, boundedness_report, ratio_series, shifted_ratio_series, EngineConfig,
    GramState, Sampling,
};
use gramheight::family::{PadRule, VectorFamily};
use gramheight::{Matrix, Rational, Scalar, Tolerance};
use num_traits::Zero;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

/// Least-squares residual `min_t ‖f_s − Σ_{k≠s} t_k f_k‖²` by Gauss–Jordan on
/// the normal equations, in exact arithmetic.
fn residual_oracle(rows: &[Vec<Rational>], s: usize) -> Rational {
    let target = &rows[s];
    let basis: Vec<&Vec<Rational>> = rows
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != s)
        .map(|(_, r)| r)
        .collect();
    let p = basis.len();
    let ip = |a: &[Rational], b: &[Rational]| -> Rational {
        a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
    };
    let mut aug: Vec<Vec<Rational>> = (0..p)
        .map(|i| {
            let mut row: Vec<Rational> = (0..p).map(|j| ip(basis[i], basis[j])).collect();
            row.push(ip(basis[i], target));
            row
        })
        .collect();
    for col in 0..p {
        let piv = (col..p).find(|&r| !aug[r][col].is_zero()).expect("independent basis");
        aug.swap(col, piv);
        let pv = aug[col][col].clone();
        for v in aug[col].iter_mut() {
            *v = v.clone() / &pv;
        }
        for r in 0..p {
            if r != col && !aug[r][col].is_zero() {
                let f = aug[r][col].clone();
                for c in 0..=p {
                    let sub = aug[col][c].clone() * &f;
                    aug[r][c] = aug[r][c].clone() - sub;
                }
            }
        }
    }
    let residual: Vec<Rational> = (0..target.len())
        .map(|k| {
            let mut v = target[k].clone();
            for (i, b) in basis.iter().enumerate() {
                v = v - aug[i][p].clone() * &b[k];
            }
            v
        })
        .collect();
    ip(&residual, &residual)
}

#[test]
fn monomial_m1_series_matches_closed_form() {
    let fam = VectorFamily::<Rational>::monomial(1);
    let s = ratio_series(&fam, 900, 0, EngineConfig::default()).unwrap();
    for e in &s.entries {
        let n = e.n as i64;
        assert_eq!(e.ratio, q(n * (n - 1), 2 * (2 * n + 1)), "n = {n}");
    }
    assert!(s.monotonicity_violations(&Tolerance::default()).is_empty());
}

#[test]
fn monomial_m1_crosses_thousand_fold_growth_at_802() {
    let fam = VectorFamily::<Rational>::monomial(1);
    let s = ratio_series(&fam, 1000, 0, EngineConfig::default()).unwrap();
    let r2 = s.at(2).unwrap().ratio.clone();
    assert_eq!(r2, q(1, 5));
    let bound = r2 * Rational::from_i64(1000);
    let first = s.entries.iter().find(|e| e.ratio > bound).unwrap();
    assert_eq!(first.n, 802);
    assert_eq!(s.at(801).unwrap().ratio, q(801 * 800, 2 * 1603));
}

#[test]
fn series_matches_least_squares_oracle() {
    for m in 1..=3 {
        let fam = VectorFamily::<Rational>::monomial(m);
        for drop in 0..=m {
            let s = ratio_series(&fam, 12, drop, EngineConfig::default()).unwrap();
            for e in &s.entries {
                let rows = fam.truncations(e.n).unwrap();
                assert_eq!(e.ratio, residual_oracle(&rows, drop), "m={m} s={drop} n={}", e.n);
            }
        }
    }
}

#[test]
fn float_series_tracks_exact_series() {
    let exact = ratio_series(&VectorFamily::<Rational>::monomial(2), 200, 0, EngineConfig::default())
        .unwrap();
    let float = ratio_series(&VectorFamily::<f64>::monomial(2), 200, 0, EngineConfig::default())
        .unwrap();
    for (a, b) in exact.entries.iter().zip(&float.entries) {
        let want = a.ratio.to_f64();
        assert!((want - b.ratio).abs() <= 1e-6 * want.abs().max(1.0), "n={} {want} {}", a.n, b.ratio);
    }
}

#[test]
fn shifted_series_is_at_least_one_and_nondecreasing() {
    let fam = VectorFamily::<Rational>::monomial(2);
    let s = shifted_ratio_series(&fam, 30, 0, EngineConfig::default()).unwrap();
    assert_eq!(s.entries[0].n, 1);
    assert!(s.entries.iter().all(|e| e.ratio >= q(1, 1)));
    assert!(s.monotonicity_violations(&Tolerance::default()).is_empty());
}

#[test]
fn boundedness_invariants_on_monomials() {
    for m in 1..=3 {
        let fam = VectorFamily::<Rational>::monomial(m);
        let rep = boundedness_report(&fam, 64, &Sampling::Geometric, EngineConfig::default()).unwrap();
        assert!(rep.all_ok());
        assert!(rep.flagged().is_empty());
    }
}

fn small_table() -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
    (1usize..=3, 3usize..=9).prop_flat_map(|(m, w)| {
        (
            Just(m),
            prop::collection::vec(prop::collection::vec(-4i64..=4, w), m + 1),
        )
    })
}

fn family_from(rows: &[Vec<i64>], pad: PadRule) -> VectorFamily<Rational> {
    let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
    VectorFamily::padded(Matrix::from_i64_rows(&refs).unwrap(), pad, "t").unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn incremental_equals_batch((m, rows) in small_table(), reanchor in 0usize..4) {
        let fam = family_from(&rows, PadRule::Monomial);
        let config = EngineConfig { reanchor_every: reanchor, ..EngineConfig::default() };
        let tol = Tolerance::default();
        for drop in [0, m] {
            for shifted in [false, true] {
                let mut st = GramState::new(m + 1, drop, shifted, config).unwrap();
                for n in 1..=14 {
                    st.advance(&fam).unwrap();
                    let (full, reduced) = batch_determinants(&fam, n, drop, shifted, &tol).unwrap();
                    prop_assert_eq!(st.det_full(), &full);
                    prop_assert_eq!(st.det_reduced(), &reduced);
                }
            }
        }
    }

    #[test]
    fn gram_determinants_never_decrease((m, rows) in small_table()) {
        let fam = family_from(&rows, PadRule::Zero);
        let mut st = GramState::new(m + 1, 0, false, EngineConfig::default()).unwrap();
        let mut prev = (Rational::zero(), Rational::zero());
        for _ in 0..rows[0].len() + 2 {
            st.advance(&fam).unwrap();
            prop_assert!(st.det_full() >= &prev.0);
            prop_assert!(st.det_reduced() >= &prev.1);
            prev = (st.det_full().clone(), st.det_reduced().clone());
        }
    }

    #[test]
    fn ratio_never_decreases((m, rows) in small_table(), drop_pick in 0usize..4) {
        let fam = family_from(&rows, PadRule::Monomial);
        let drop = drop_pick.min(m);
        let s = ratio_series(&fam, 16, drop, EngineConfig::default()).unwrap();
        prop_assert!(s.monotonicity_violations(&Tolerance::default()).is_empty());
    }

    #[test]
    fn cofactor_table_invariants((m, rows) in small_table()) {
        let fam = family_from(&rows, PadRule::Monomial);
        let rep = boundedness_report(&fam, 12, &Sampling::Every(1), EngineConfig::default()).unwrap();
        for row in &rep.rows {
            prop_assert!(row.cauchy_schwarz_ok);
            prop_assert!(row.envelope_ok);
            prop_assert_eq!(row.table.rows(), m + 1);
        }
    }

    #[test]
    fn float_incremental_matches_exact((m, rows) in small_table()) {
        let exact = family_from(&rows, PadRule::Monomial);
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        let float = VectorFamily::padded(Matrix::<f64>::from_i64_rows(&refs).unwrap(), PadRule::Monomial, "t").unwrap();
        let mut se = GramState::new(m + 1, 0, true, EngineConfig::default()).unwrap();
        let mut sf = GramState::new(m + 1, 0, true, EngineConfig::default()).unwrap();
        for _ in 0..20 {
            se.advance(&exact).unwrap();
            sf.advance(&float).unwrap();
            let want = se.det_full().to_f64();
            prop_assert!((want - sf.det_full()).abs() <= 1e-8 * want.abs());
        }
    }
}
