//! Plain-text matrix exchange format.
//!
//! ```text
//! dim <rows> <cols>
//! <row> <col> <re> <im>
//! ...
//! ```
//!
//! Omitted entries are zero. Several matrices may follow one another; each
//! block starts with its own `dim` header.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, ZERO};

/// Shortest round-trip decimal form; negative zero prints as `0`.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x}")
    }
}

pub fn format_matrix(m: &CMatrix) -> String {
    let mut out = format!("dim {} {}\n", m.nrows(), m.ncols());
    for ((i, j), z) in m.indexed_iter() {
        if *z != ZERO {
            let _ = writeln!(out, "{i} {j} {} {}", fmt_f64(z.re), fmt_f64(z.im));
        }
    }
    out
}

pub fn write_matrix<W: std::io::Write>(w: &mut W, m: &CMatrix) -> Result<()> {
    w.write_all(format_matrix(m).as_bytes())?;
    Ok(())
}

/// Parses every matrix block in `text`.
pub fn parse_matrices(text: &str) -> Result<Vec<CMatrix>> {
    let mut out: Vec<CMatrix> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields[0] == "dim" {
            if fields.len() != 3 {
                return Err(err(format!("expected `dim <rows> <cols>`, got `{line}`")));
            }
            let rows: usize = fields[1]
                .parse()
                .map_err(|_| err(format!("bad row count `{}`", fields[1])))?;
            let cols: usize = fields[2]
                .parse()
                .map_err(|_| err(format!("bad column count `{}`", fields[2])))?;
            out.push(CMatrix::zeros((rows, cols)));
            continue;
        }
        let m = out.last_mut().ok_or_else(|| err("entry before `dim` header".into()))?;
        if fields.len() != 4 {
            return Err(err(format!("expected `row col re im`, got `{line}`")));
        }
        let i: usize = fields[0]
            .parse()
            .map_err(|_| err(format!("bad row index `{}`", fields[0])))?;
        let j: usize = fields[1]
            .parse()
            .map_err(|_| err(format!("bad column index `{}`", fields[1])))?;
        let re: f64 = fields[2]
            .parse()
            .map_err(|_| err(format!("bad real part `{}`", fields[2])))?;
        let im: f64 = fields[3]
            .parse()
            .map_err(|_| err(format!("bad imaginary part `{}`", fields[3])))?;
        if i >= m.nrows() || j >= m.ncols() {
            return Err(err(format!("entry ({i}, {j}) outside {}x{}", m.nrows(), m.ncols())));
        }
        m[(i, j)] = c(re, im);
    }
    Ok(out)
}

/// Parses exactly one matrix.
pub fn parse_matrix(text: &str) -> Result<CMatrix> {
    let mut all = parse_matrices(text)?;
    match all.len() {
        1 => Ok(all.pop().unwrap()),
        n => Err(Error::Parse {
            line: 0,
            msg: format!("expected one matrix, found {n}"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sparse_entries_only() {
        let mut m = CMatrix::zeros((2, 3));
        m[(1, 2)] = c(-0.5, 1e-300);
        let s = format_matrix(&m);
        assert_eq!(s.lines().count(), 2);
        assert!(s.starts_with("dim 2 3\n"));
        assert_eq!(parse_matrix(&s).unwrap(), m);
    }

    #[test]
    fn parse_errors_carry_line() {
        let e = parse_matrix("dim 2 2\n0 0 1 0\n5 0 1 0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
        assert!(matches!(parse_matrix("0 0 1 0\n"), Err(Error::Parse { line: 1, .. })));
        assert!(parse_matrix("dim 2 x\n").is_err());
    }

    proptest! {
        #[test]
        fn round_trip_is_exact(vals in proptest::collection::vec((-1e6f64..1e6, -1e6f64..1e6), 9)) {
            let m = CMatrix::from_shape_fn((3, 3), |(i, j)| {
                let (re, im) = vals[i * 3 + j];
                c(re, im)
            });
            prop_assert_eq!(parse_matrix(&format_matrix(&m)).unwrap(), m);
        }
    }
}
