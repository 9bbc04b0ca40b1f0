//! Families of infinite vectors `f_0, …, f_m` given by an entry rule
//! `f_{rk}`, `k = 1, 2, …`.

use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{powi, Scalar};

/// Rule used for columns past the end of a tabulated prefix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PadRule {
    Zero,
    Monomial,
    LogPower,
}

impl PadRule {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(PadRule::Zero),
            "monomial" => Ok(PadRule::Monomial),
            "log-power" => Ok(PadRule::LogPower),
            other => Err(Error::InvalidInput(format!(
                "unknown pad rule {other:?} (expected zero, monomial or log-power)"
            ))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PadRule::Zero => "zero",
            PadRule::Monomial => "monomial",
            PadRule::LogPower => "log-power",
        }
    }

    fn entry<S: Scalar>(self, r: usize, k: usize) -> Result<S> {
        match self {
            PadRule::Zero => Ok(S::zero()),
            PadRule::Monomial => Ok(powi(&S::from_i64(k as i64), r as u32)),
            PadRule::LogPower => {
                let v = ((k + 1) as f64).ln().powi(r as i32);
                S::from_f64(v).ok_or_else(|| Error::Unsupported {
                    mode: S::MODE.as_str(),
                    what: "log-power entries are irrational".into(),
                })
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FamilyRule<S> {
    /// `f_{rk} = k^r`.
    Monomial,
    /// `f_{rk} = (log(k+1))^r`; float backend only.
    LogPower,
    /// Finite table, row `r` is `f_r`; the horizon is the table width.
    Csv(Matrix<S>),
    /// Tabulated prefix continued by a padding rule.
    Custom { table: Matrix<S>, pad: PadRule },
}

#[derive(Clone, Debug, PartialEq)]
pub struct VectorFamily<S> {
    rows: usize,
    rule: FamilyRule<S>,
    label: String,
}

impl<S: Scalar> VectorFamily<S> {
    /// Rows `1, k, k², …, k^m`.
    pub fn monomial(m: usize) -> Self {
        Self {
            rows: m + 1,
            rule: FamilyRule::Monomial,
            label: format!("monomial m={m}"),
        }
    }

    pub fn log_power(m: usize) -> Result<Self> {
        if S::EXACT {
            return Err(Error::Unsupported {
                mode: S::MODE.as_str(),
                what: "log-power family has irrational entries".into(),
            });
        }
        Ok(Self {
            rows: m + 1,
            rule: FamilyRule::LogPower,
            label: format!("log-power m={m}"),
        })
    }

    pub fn from_table(table: Matrix<S>, label: impl Into<String>) -> Result<Self> {
        if table.rows() == 0 {
            return Err(Error::InvalidInput("family table has no rows".into()));
        }
        Ok(Self {
            rows: table.rows(),
            rule: FamilyRule::Csv(table),
            label: label.into(),
        })
    }

    pub fn padded(table: Matrix<S>, pad: PadRule, label: impl Into<String>) -> Result<Self> {
        if table.rows() == 0 {
            return Err(Error::InvalidInput("family table has no rows".into()));
        }
        if pad == PadRule::LogPower && S::EXACT {
            return Err(Error::Unsupported {
                mode: S::MODE.as_str(),
                what: "log-power padding has irrational entries".into(),
            });
        }
        Ok(Self {
            rows: table.rows(),
            rule: FamilyRule::Custom { table, pad },
            label: label.into(),
        })
    }

    /// `m + 1` zero rows of unbounded length.
    pub fn zeros(m: usize) -> Self {
        Self {
            rows: m + 1,
            rule: FamilyRule::Custom {
                table: Matrix::zeros(m + 1, 0),
                pad: PadRule::Zero,
            },
            label: format!("zero m={m}"),
        }
    }

    /// Index of the last row; the family is `f_0, …, f_m`.
    pub fn m(&self) -> usize {
        self.rows - 1
    }

    pub fn row_count(&self) -> usize {
        self.rows
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn rule(&self) -> &FamilyRule<S> {
        &self.rule
    }

    pub fn kind(&self) -> &'static str {
        match self.rule {
            FamilyRule::Monomial => "monomial",
            FamilyRule::LogPower => "log-power",
            FamilyRule::Csv(_) => "csv",
            FamilyRule::Custom { .. } => "custom",
        }
    }

    /// Last defined column, `None` for unbounded rules.
    pub fn horizon(&self) -> Option<usize> {
        match &self.rule {
            FamilyRule::Csv(t) => Some(t.cols()),
            _ => None,
        }
    }

    /// `f_{rk}` with one-based `k`.
    pub fn entry(&self, r: usize, k: usize) -> Result<S> {
        if r >= self.rows {
            return Err(Error::IndexOutOfRange {
                index: r,
                order: self.rows,
            });
        }
        if k == 0 {
            return Err(Error::InvalidInput("column indices start at 1".into()));
        }
        match &self.rule {
            FamilyRule::Monomial => PadRule::Monomial.entry(r, k),
            FamilyRule::LogPower => PadRule::LogPower.entry(r, k),
            FamilyRule::Csv(t) => t
                .get(r, k - 1)
                .cloned()
                .ok_or(Error::HorizonExceeded {
                    requested: k,
                    horizon: t.cols(),
                }),
            FamilyRule::Custom { table, pad } => match table.get(r, k - 1) {
                Some(v) => Ok(v.clone()),
                None => pad.entry(r, k),
            },
        }
    }

    /// Column `k` across all rows, `(f_{0k}, …, f_{mk})`.
    pub fn column(&self, k: usize) -> Result<Vec<S>> {
        (0..self.rows).map(|r| self.entry(r, k)).collect()
    }

    /// Truncations `f_r^{(n)} = (f_{r1}, …, f_{rn})` for every row.
    pub fn truncations(&self, n: usize) -> Result<Vec<Vec<S>>> {
        (0..self.rows)
            .map(|r| (1..=n).map(|k| self.entry(r, k)).collect())
            .collect()
    }
}

impl<S> fmt::Display for VectorFamily<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}
