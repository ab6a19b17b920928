//! JSON and CSV serialisation helpers.
//!
//! JSON numbers are written in scientific notation with 17 significant
//! digits, which is enough to round-trip any f64 exactly, so serialised
//! artefacts are byte-reproducible across runs. CSV values (plot feed)
//! carry 12 significant digits.

use std::io;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// serde_json formatter that writes every f64 with 17 significant digits.
struct Sig17Formatter;

impl serde_json::ser::Formatter for Sig17Formatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }
}

/// Serialise to a JSON string with 17-significant-digit reals.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sig17Formatter);
    value
        .serialize(&mut ser)
        .expect("in-memory JSON serialisation cannot fail");
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

/// One CSV cell at 12 significant digits; `None` becomes an empty cell.
pub fn csv_cell(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v:.11e}"),
        None => String::new(),
    }
}

/// Row-major [re, im] grid, the wire format for one operator.
pub type OperatorGrid = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_grid(m: &ComplexMatrix) -> OperatorGrid {
    let d = m.dim();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let z = m.entry(i, j);
                    [z.re, z.im]
                })
                .collect()
        })
        .collect()
}

pub fn grid_to_matrix(grid: &OperatorGrid) -> Result<ComplexMatrix> {
    let d = grid.len();
    for row in grid {
        if row.len() != d {
            return Err(Error::DimMismatch {
                expected: d,
                found: row.len(),
            });
        }
    }
    ComplexMatrix::from_fn(d, |i, j| Complex64::new(grid[i][j][0], grid[i][j][1]))
}

pub fn write_file(path: &std::path::Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_file(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_floats_round_trip_exactly() {
        #[derive(Serialize)]
        struct Probe {
            x: f64,
            y: f64,
        }
        let p = Probe {
            x: 0.1 + 0.2,
            y: 2.0 / 3.0,
        };
        let text = to_json(&p);
        let back: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["x"].as_f64().unwrap(), p.x);
        assert_eq!(back["y"].as_f64().unwrap(), p.y);
    }

    #[test]
    fn grid_round_trip() {
        let m = ComplexMatrix::from_fn(3, |i, j| Complex64::new(i as f64, j as f64)).unwrap();
        let grid = matrix_to_grid(&m);
        let back = grid_to_matrix(&grid).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn csv_cells() {
        assert_eq!(csv_cell(None), "");
        assert!(csv_cell(Some(0.75)).starts_with("7.5"));
    }
}
