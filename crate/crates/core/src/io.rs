//! Plain-text matrix and vector formats.
//!
//! Matrices: one row per line, comma-separated decimals, `#` comment lines,
//! constant column count. Vectors: one value per line, or a single
//! comma-separated line.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::dictionary::{normalize_columns, rows_to_matrix, Dictionary, NORM_TOL};
use crate::error::{Error, Result};

/// Column norms may deviate from 1 by this much in input files.
pub const FILE_NORM_TOL: f64 = 1e-8;

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_row(line_no: usize, line: &str) -> Result<Vec<f64>> {
    line.split(',')
        .enumerate()
        .map(|(c, field)| {
            let field = field.trim();
            field.parse::<f64>().map_err(|_| Error::Parse {
                line: line_no,
                column: c + 1,
                message: format!("invalid number {field:?}"),
            })
        })
        .collect()
}

pub fn parse_matrix(text: &str) -> Result<DMatrix<f64>> {
    let mut rows = Vec::new();
    let mut width = None;
    for (line_no, line) in data_lines(text) {
        let row = parse_row(line_no, line)?;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::Parse {
                    line: line_no,
                    column: row.len().min(w) + 1,
                    message: format!("expected {w} columns, found {}", row.len()),
                })
            }
            _ => {}
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "no matrix rows".into(),
        });
    }
    rows_to_matrix(&rows)
}

/// Writes a matrix in the shortest round-trip decimal form.
pub fn write_matrix(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{}", m[(i, j)]).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn parse_vector(text: &str) -> Result<DVector<f64>> {
    let mut values = Vec::new();
    for (line_no, line) in data_lines(text) {
        values.extend(parse_row(line_no, line)?);
    }
    if values.is_empty() {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "no vector entries".into(),
        });
    }
    Ok(DVector::from_vec(values))
}

pub fn write_vector(v: &DVector<f64>) -> String {
    v.iter().fold(String::new(), |mut s, x| {
        writeln!(s, "{x}").unwrap();
        s
    })
}

/// Validates a parsed matrix as a dictionary.
///
/// Columns within [`NORM_TOL`] of unit norm are kept bit-for-bit. Columns
/// off by at most [`FILE_NORM_TOL`] are rescaled; anything further off is a
/// `NormViolation` unless `renormalize` is set.
pub fn dictionary_from_matrix(m: DMatrix<f64>, renormalize: bool) -> Result<Dictionary> {
    if renormalize {
        return normalize_columns(m);
    }
    let mut needs_rescale = false;
    for (j, col) in m.column_iter().enumerate() {
        let norm = col.norm();
        if !norm.is_finite() {
            return normalize_columns(m);
        }
        let dev = (norm - 1.0).abs();
        if dev > FILE_NORM_TOL {
            return Err(Error::NormViolation { index: j + 1, norm });
        }
        needs_rescale |= dev > NORM_TOL;
    }
    if needs_rescale {
        normalize_columns(m)
    } else {
        Dictionary::new(m)
    }
}

pub fn read_dictionary(path: &Path, renormalize: bool) -> Result<Dictionary> {
    let text = std::fs::read_to_string(path)?;
    dictionary_from_matrix(parse_matrix(&text)?, renormalize)
}

pub fn read_vector(path: &Path) -> Result<DVector<f64>> {
    parse_vector(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_rows() {
        let m = parse_matrix("# header\n1, 0\n\n0,1\n").unwrap();
        assert_eq!(m, DMatrix::identity(2, 2));
    }

    #[test]
    fn ragged_rows_report_position() {
        let err = parse_matrix("1,0,0\n0,1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_matrix("1,x\n").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 1,
                column: 2,
                message: "invalid number \"x\"".into()
            }
        );
    }

    #[test]
    fn vector_formats() {
        assert_eq!(
            parse_vector("1\n2\n3\n").unwrap().as_slice(),
            &[1.0, 2.0, 3.0]
        );
        assert_eq!(
            parse_vector("1, 2, 3").unwrap().as_slice(),
            &[1.0, 2.0, 3.0]
        );
    }

    #[test]
    fn write_then_parse_is_bit_exact() {
        let m = DMatrix::from_fn(3, 4, |i, j| ((i * 7 + j) as f64).sin() / 3.0);
        assert_eq!(parse_matrix(&write_matrix(&m)).unwrap(), m);
    }

    #[test]
    fn norm_checks() {
        let m = DMatrix::from_column_slice(2, 2, &[1.0 + 1e-10, 0.0, 0.0, 1.0]);
        let d = dictionary_from_matrix(m, false).unwrap();
        assert!((d.atom(0).norm() - 1.0).abs() < 1e-15);
        let m = DMatrix::from_column_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        assert!(matches!(
            dictionary_from_matrix(m.clone(), false),
            Err(Error::NormViolation { index: 1, .. })
        ));
        assert!(dictionary_from_matrix(m, true).is_ok());
    }
}
