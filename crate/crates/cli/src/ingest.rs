//! CSV tables of vector families: one row per vector `f_r`, comma separated,
//! `#` comment lines, optional header row.

use std::path::{Path, PathBuf};

use gramheight::{Matrix, Scalar};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{0}: no data rows")]
    Empty(String),
    #[error("{origin}: ragged row {row} (line {line}): expected {expected} cells, found {found}")]
    Ragged {
        origin: String,
        row: usize,
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("{origin}: non-numeric cell at row {row}, column {col} (line {line}): {text:?}: {reason}")]
    NonNumeric {
        origin: String,
        row: usize,
        col: usize,
        line: u64,
        text: String,
        reason: String,
    },
    #[error("{origin}: {source}")]
    Csv { origin: String, source: csv::Error },
}

/// Reads a table from `path`. Rows and columns in errors are one-based and
/// count data rows only.
pub fn ingest_csv<S: Scalar>(path: &Path) -> Result<Matrix<S>, IngestError> {
    let text = std::fs::read_to_string(path).map_err(|source| IngestError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_table(&text, &path.display().to_string())
}

/// A first row in which no cell parses as a number is taken as a header.
pub fn parse_table<S: Scalar>(text: &str, origin: &str) -> Result<Matrix<S>, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<S>> = Vec::new();
    let mut first = true;
    for record in reader.records() {
        let record = record.map_err(|source| IngestError::Csv {
            origin: origin.to_string(),
            source,
        })?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        if first {
            first = false;
            if record.iter().all(|c| S::parse_scalar(c).is_err()) {
                continue;
            }
        }
        let row = rows.len() + 1;
        let line = record.position().map_or(0, |p| p.line());
        if let Some(expected) = rows.first().map(Vec::len) {
            if record.len() != expected {
                return Err(IngestError::Ragged {
                    origin: origin.to_string(),
                    row,
                    line,
                    expected,
                    found: record.len(),
                });
            }
        }
        let parsed = record
            .iter()
            .enumerate()
            .map(|(c, cell)| {
                S::parse_scalar(cell).map_err(|e| IngestError::NonNumeric {
                    origin: origin.to_string(),
                    row,
                    col: c + 1,
                    line,
                    text: cell.to_string(),
                    reason: match e {
                        gramheight::Error::Parse { reason, .. } => reason,
                        other => other.to_string(),
                    },
                })
            })
            .collect::<Result<Vec<S>, _>>()?;
        rows.push(parsed);
    }
    if rows.is_empty() || rows[0].is_empty() {
        return Err(IngestError::Empty(origin.to_string()));
    }
    Ok(Matrix::from_rows(rows).expect("rows checked rectangular"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use gramheight::Rational;

    #[test]
    fn header_and_comments_are_skipped() {
        let t: Matrix<Rational> = parse_table("# family\nk1,k2,k3\n1,2,3\n4, 5 ,6\n", "t").unwrap();
        assert_eq!((t.rows(), t.cols()), (2, 3));
        assert_eq!(t[(1, 1)], Rational::from_i64(5));
    }

    #[test]
    fn ragged_row_is_named() {
        let e = parse_table::<f64>("1,2,3\n4,5\n", "t").unwrap_err();
        assert!(matches!(e, IngestError::Ragged { row: 2, expected: 3, found: 2, .. }), "{e}");
        assert!(e.to_string().contains("row 2"));
    }

    #[test]
    fn non_numeric_cell_has_coordinates() {
        let e = parse_table::<Rational>("1,2\n3,x\n", "t").unwrap_err();
        assert!(matches!(e, IngestError::NonNumeric { row: 2, col: 2, .. }), "{e}");
    }

    #[test]
    fn empty_input() {
        assert!(matches!(parse_table::<f64>("# nothing\n\n", "t"), Err(IngestError::Empty(_))));
        assert!(matches!(parse_table::<f64>("a,b\n", "t"), Err(IngestError::Empty(_))));
    }

    #[test]
    fn exact_fractions_round_trip() {
        let t: Matrix<Rational> = parse_table("1/3,2\n", "t").unwrap();
        let third = Rational::from_ratio(1, 3);
        assert_eq!(t[(0, 0)], third);
        let (n, d) = third.exact_parts().unwrap();
        assert_eq!(Rational::parse_scalar(&format!("{n}/{d}")).unwrap(), third);
    }
}
