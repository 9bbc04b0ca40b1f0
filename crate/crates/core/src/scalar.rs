//! The field abstraction every routine in this crate is generic over.
//!
//! Two backends exist: [`Rational`] (arbitrary precision, exact equality) and
//! `f64` (binary64, compared through a [`Tolerance`]).

use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// Relative tolerance with an absolute floor, used by every approximate
/// comparison in the float backend. Ignored by the exact backend.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel: 1e-9,
            abs: 1e-12,
        }
    }
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64) -> Self {
        Self { rel, abs }
    }

    /// `|a - b| <= max(abs, rel * max(|a|, |b|))`.
    pub fn close(&self, a: f64, b: f64) -> bool {
        if a == b {
            return true;
        }
        let diff = (a - b).abs();
        diff <= self.abs.max(self.rel * a.abs().max(b.abs()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarMode {
    Exact,
    Float,
}

impl ScalarMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ScalarMode::Exact => "exact",
            ScalarMode::Float => "float",
        }
    }
}

impl Display for ScalarMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScalarMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(ScalarMode::Exact),
            "float" => Ok(ScalarMode::Float),
            other => Err(Error::InvalidInput(format!(
                "unknown scalar mode {other:?} (expected exact or float)"
            ))),
        }
    }
}

pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Signed
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
{
    /// True when arithmetic is exact and equality is decidable.
    const EXACT: bool;
    const MODE: ScalarMode;

    fn from_i64(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    fn to_f64(&self) -> f64;

    /// Conversion from binary64 where the backend treats it as meaningful.
    /// The exact backend returns `None`: a rounded transcendental value is
    /// not exact data.
    fn from_f64(x: f64) -> Option<Self>;

    /// Whether `self` counts as zero relative to `scale`.
    ///
    /// Exact: `self == 0`. Float: `|self| < tol.abs * max(1, |scale|)`.
    fn is_negligible(&self, scale: &Self, tol: &Tolerance) -> bool;

    /// Exact equality, or [`Tolerance::close`] for floats.
    fn approx_eq(&self, other: &Self, tol: &Tolerance) -> bool;

    /// `self <= other`, allowing float slack of the given tolerance.
    fn le_tol(&self, other: &Self, tol: &Tolerance) -> bool {
        self <= other || self.approx_eq(other, tol)
    }

    /// Square root when it exists in the backend (perfect squares for rationals).
    fn checked_sqrt(&self) -> Option<Self>;

    fn parse_scalar(text: &str) -> Result<Self>;

    /// Decimal rendering with 17 significant digits.
    fn to_decimal_string(&self) -> String {
        format!("{:.16e}", self.to_f64())
    }

    /// Numerator and denominator strings for exact values.
    fn exact_parts(&self) -> Option<(String, String)>;
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const MODE: ScalarMode = ScalarMode::Float;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_f64(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }

    fn is_negligible(&self, scale: &Self, tol: &Tolerance) -> bool {
        self.abs() < tol.abs * scale.abs().max(1.0)
    }

    fn approx_eq(&self, other: &Self, tol: &Tolerance) -> bool {
        tol.close(*self, *other)
    }

    fn checked_sqrt(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }

    fn parse_scalar(text: &str) -> Result<Self> {
        let t = text.trim();
        if let Some((p, q)) = t.split_once('/') {
            let num: f64 = parse_f64(p, text)?;
            let den: f64 = parse_f64(q, text)?;
            if den == 0.0 {
                return Err(parse_err(text, "zero denominator"));
            }
            return Ok(num / den);
        }
        parse_f64(t, text)
    }

    fn exact_parts(&self) -> Option<(String, String)> {
        None
    }
}

fn parse_f64(part: &str, text: &str) -> Result<f64> {
    let v: f64 = part
        .trim()
        .parse()
        .map_err(|e: std::num::ParseFloatError| parse_err(text, &e.to_string()))?;
    if !v.is_finite() {
        return Err(parse_err(text, "not finite"));
    }
    Ok(v)
}

fn parse_err(text: &str, reason: &str) -> Error {
    Error::Parse {
        text: text.to_string(),
        reason: reason.to_string(),
    }
}

fn parse_bigint(part: &str, text: &str) -> Result<BigInt> {
    part.trim()
        .parse::<BigInt>()
        .map_err(|e| parse_err(text, &e.to_string()))
}

/// Parses `"3"`, `"-1/3"` or a plain decimal such as `"0.125"` exactly.
fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    if t.is_empty() {
        return Err(parse_err(text, "empty cell"));
    }
    if let Some((p, q)) = t.split_once('/') {
        let num = parse_bigint(p, text)?;
        let den = parse_bigint(q, text)?;
        if den.is_zero() {
            return Err(parse_err(text, "zero denominator"));
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((int_part, frac_part)) = t.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(parse_err(text, "malformed decimal"));
        }
        let negative = int_part.starts_with('-');
        let digits = format!("{}{}", int_part.trim_start_matches(['-', '+']), frac_part);
        let mut num = parse_bigint(&digits, text)?;
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10u32), frac_part.len());
        return Ok(Rational::new(num, den));
    }
    Ok(Rational::from_integer(parse_bigint(t, text)?))
}

fn bigint_sqrt(v: &BigInt) -> Option<BigInt> {
    if v.is_negative() {
        return None;
    }
    let r = v.sqrt();
    (&r * &r == *v).then_some(r)
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const MODE: ScalarMode = ScalarMode::Exact;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_f64(_x: f64) -> Option<Self> {
        None
    }

    fn is_negligible(&self, _scale: &Self, _tol: &Tolerance) -> bool {
        self.is_zero()
    }

    fn approx_eq(&self, other: &Self, _tol: &Tolerance) -> bool {
        self == other
    }

    fn checked_sqrt(&self) -> Option<Self> {
        let n = bigint_sqrt(self.numer())?;
        let d = bigint_sqrt(self.denom())?;
        Some(Rational::new(n, d))
    }

    fn parse_scalar(text: &str) -> Result<Self> {
        parse_rational(text)
    }

    fn exact_parts(&self) -> Option<(String, String)> {
        Some((self.numer().to_string(), self.denom().to_string()))
    }
}

/// Sums `terms` in a fixed pairwise order (blocks of 8 summed left to right).
///
/// The order depends only on the number of terms, so float results are
/// reproducible bit for bit.
pub fn pairwise_sum<S: Scalar>(terms: &[S]) -> S {
    const BLOCK: usize = 8;
    if terms.len() <= BLOCK {
        let mut acc = S::zero();
        for t in terms {
            acc += t;
        }
        return acc;
    }
    let mid = terms.len() / 2;
    pairwise_sum(&terms[..mid]) + pairwise_sum(&terms[mid..])
}

/// Inner product `(x, y)` with pairwise summation.
pub fn dot<S: Scalar>(x: &[S], y: &[S]) -> S {
    debug_assert_eq!(x.len(), y.len());
    let products: Vec<S> = x.iter().zip(y).map(|(a, b)| a.clone() * b).collect();
    pairwise_sum(&products)
}

/// Integer power by repeated multiplication.
pub fn powi<S: Scalar>(base: &S, exp: u32) -> S {
    let mut acc = S::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn parses_rational_forms() {
        assert_eq!(Rational::parse_scalar("1/3").unwrap(), q(1, 3));
        assert_eq!(Rational::parse_scalar(" -7 ").unwrap(), q(-7, 1));
        assert_eq!(Rational::parse_scalar("0.125").unwrap(), q(1, 8));
        assert_eq!(Rational::parse_scalar("-2.5").unwrap(), q(-5, 2));
        assert_eq!(Rational::parse_scalar("4/-6").unwrap(), q(-2, 3));
        assert!(Rational::parse_scalar("1/0").is_err());
        assert!(Rational::parse_scalar("abc").is_err());
        assert!(Rational::parse_scalar("").is_err());
        assert!(Rational::parse_scalar("1.").is_err());
    }

    #[test]
    fn parses_float_forms() {
        assert_eq!(f64::parse_scalar("0.5").unwrap(), 0.5);
        assert_eq!(f64::parse_scalar("1/4").unwrap(), 0.25);
        assert!(f64::parse_scalar("nan").is_err());
        assert!(f64::parse_scalar("x").is_err());
    }

    #[test]
    fn exact_parts_reparse() {
        let v = q(-22, 6);
        let (n, d) = v.exact_parts().unwrap();
        assert_eq!((n.as_str(), d.as_str()), ("-11", "3"));
        assert_eq!(Rational::parse_scalar(&format!("{n}/{d}")).unwrap(), v);
    }

    #[test]
    fn rational_sqrt_only_for_perfect_squares() {
        assert_eq!(q(9, 4).checked_sqrt(), Some(q(3, 2)));
        assert_eq!(q(2, 1).checked_sqrt(), None);
        assert_eq!(q(-1, 1).checked_sqrt(), None);
        assert_eq!(4.0f64.checked_sqrt(), Some(2.0));
    }

    #[test]
    fn tolerance_close() {
        let tol = Tolerance::default();
        assert!(tol.close(1.0, 1.0 + 1e-12));
        assert!(!tol.close(1.0, 1.0 + 1e-6));
        assert!(tol.close(0.0, 1e-13));
        assert!(1e-13f64.is_negligible(&1.0, &tol));
        assert!(!1e-3f64.is_negligible(&1e6, &tol));
    }

    #[test]
    fn pairwise_sum_matches_naive_exactly_for_rationals() {
        let terms: Vec<Rational> = (1..=37).map(|k| q(1, k)).collect();
        let naive = terms.iter().fold(Rational::zero(), |a, b| a + b);
        assert_eq!(pairwise_sum(&terms), naive);
    }

    #[test]
    fn decimal_string_has_17_significant_digits() {
        let s = (1.0f64 / 3.0).to_decimal_string();
        assert_eq!(s, "3.3333333333333331e-1");
        assert_eq!(s.parse::<f64>().unwrap(), 1.0 / 3.0);
    }
}
