//! Plain-text matrix exchange: a `n=<order>` header followed by `n`
//! comma-separated rows, each entry written with 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use super::matrix::SymMatrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub fn to_csv<T: Scalar>(m: &SymMatrix<T>) -> String {
    let n = m.order();
    let mut out = String::with_capacity(n * n * 24 + 8);
    let _ = writeln!(out, "n={n}");
    for i in 0..n {
        for (j, v) in m.row(i).iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v:.16e}");
        }
        out.push('\n');
    }
    out
}

pub fn from_csv<T: Scalar>(text: &str) -> Result<SymMatrix<T>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty matrix file".into()))?;
    let n: usize = header
        .trim()
        .strip_prefix("n=")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad header {header:?}")))?;
    let mut rows = Vec::with_capacity(n);
    for (i, line) in lines.enumerate() {
        let row = line
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<T>()
                    .map_err(|_| Error::Parse(format!("row {i}: bad entry {tok:?}")))
            })
            .collect::<Result<Vec<T>>>()?;
        rows.push(row);
    }
    if rows.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: rows.len(),
        });
    }
    SymMatrix::from_rows(&rows)
}

pub fn write_csv<T: Scalar>(m: &SymMatrix<T>, path: &Path) -> Result<()> {
    std::fs::write(path, to_csv(m))?;
    Ok(())
}

pub fn read_csv<T: Scalar>(path: &Path) -> Result<SymMatrix<T>> {
    from_csv(&std::fs::read_to_string(path)?)
}
