//! The cosine coefficient matrix `Q[i][j] = cos(2πij/n)`, `1 ≤ i, j ≤ d`,
//! its closed-form inverse, and the consequences drawn from it for every
//! feasible point: `Xⁱ ⪯ 2I` (`Xᵈ ⪯ I`) and fixed row sums.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::linalg::{psd_tolerance, spectrum};
use crate::tsp_sdp::{assemble_psd_matrices, cos_coef, CandidateSolution};
use crate::SymMat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    /// `n = 2d`
    Even,
    /// `n = 2d + 1`
    Odd,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QMatrix {
    n: usize,
    entries: SymMat,
}

impl QMatrix {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return domain(format!("coefficient matrix needs n >= 3, got {n}"));
        }
        let d = n / 2;
        Ok(QMatrix {
            n,
            entries: SymMat::from_fn(d, |i, j| cos_coef(n, i + 1, j + 1)),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.n / 2
    }

    pub fn parity(&self) -> Parity {
        if self.n.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn entries(&self) -> &SymMat {
        &self.entries
    }
}

/// Dense product of two square matrices given as [`SymMat`]s (the product
/// itself need not be symmetric).
fn product(a: &SymMat, b: &SymMat) -> Vec<Vec<f64>> {
    a * b
}

/// Largest entry of `|QQ⁻¹ − I|`.
pub fn inverse_residual(q: &SymMat, qinv: &SymMat) -> f64 {
    product(q, qinv)
        .iter()
        .enumerate()
        .flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(move |(j, &v)| (v - if i == j { 1.0 } else { 0.0 }).abs())
        })
        .fold(0.0, f64::max)
}

/// Closed-form `Q⁻¹`, checked against `QQ⁻¹ = I` and entrywise nonpositivity.
///
/// Even `n`: `(2cos(2πij/n) − 2)/d` off the last row and column,
/// `((−1)ⁱ − 1)/d` on them, and a corner of `0` (even `d`) or `−1/d` (odd `d`).
/// Odd `n`: `(4/n)(cos(2πij/n) − 1)`.
pub fn q_inverse_closed_form(q: &QMatrix) -> Result<SymMat> {
    let n = q.n();
    let d = q.d();
    let inv = match q.parity() {
        Parity::Even => {
            let df = d as f64;
            SymMat::from_fn(d, |i0, j0| {
                let (i, j) = (i0 + 1, j0 + 1);
                if i == d && j == d {
                    if d.is_multiple_of(2) {
                        0.0
                    } else {
                        -1.0 / df
                    }
                } else if i == d || j == d {
                    let other = if i == d { j } else { i };
                    let sign = if other % 2 == 0 { 1.0 } else { -1.0 };
                    (sign - 1.0) / df
                } else {
                    (2.0 * cos_coef(n, i, j) - 2.0) / df
                }
            })
        }
        Parity::Odd => SymMat::from_fn(d, |i0, j0| {
            let angle = 2.0 * PI * (((i0 + 1) * (j0 + 1)) % n) as f64 / n as f64;
            4.0 / n as f64 * (angle.cos() - 1.0)
        }),
    };
    let residual = inverse_residual(q.entries(), &inv);
    if residual > 1e-9 {
        return Err(Error::VerificationFailed(residual));
    }
    if let Some(&v) = inv.as_slice().iter().find(|&&v| v > 1e-12) {
        return Err(Error::VerificationFailed(v));
    }
    Ok(inv)
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
pub fn numeric_inverse(a: &SymMat) -> Result<Vec<Vec<f64>>> {
    let n = a.order();
    let mut m: Vec<Vec<f64>> = a
        .rows()
        .into_iter()
        .enumerate()
        .map(|(i, mut row)| {
            row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))
            .expect("nonempty range");
        if m[piv][col].abs() < 1e-14 {
            return domain("matrix is singular");
        }
        m.swap(col, piv);
        let p = m[col][col];
        m[col].iter_mut().for_each(|v| *v /= p);
        let pivot_row = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != col && row[col] != 0.0 {
                let f = row[col];
                row.iter_mut().zip(&pivot_row).for_each(|(v, &pv)| *v -= f * pv);
            }
        }
    }
    Ok(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UpperBoundReport {
    /// Largest eigenvalue of each `Xⁱ`.
    pub max_eigs: Vec<f64>,
    /// 2 for `i < d`, 1 for `i = d`.
    pub bounds: Vec<f64>,
    /// Largest deviation of `Σ_r (−Q⁻¹)_ir M_r` from `r_i I − Xⁱ`.
    pub combination_max_dev: f64,
    /// Smallest eigenvalue among the combined matrices.
    pub combination_min_eig: f64,
    pub ok: bool,
}

/// Checks `Xⁱ ⪯ 2I` (`Xᵈ ⪯ I`) by eigenvalues, and rebuilds `r_i I − Xⁱ`
/// as the nonnegative combination `Σ_r (−Q⁻¹)_ir M_r` of the constraint
/// matrices `M_r`.
pub fn upper_bound_report(sol: &CandidateSolution, tol: f64) -> Result<UpperBoundReport> {
    let n = sol.n();
    let d = sol.d();
    let qinv = q_inverse_closed_form(&QMatrix::new(n)?)?;
    let constraints = assemble_psd_matrices(sol);
    let mut max_eigs = Vec::with_capacity(d);
    let mut bounds = Vec::with_capacity(d);
    let mut combination_max_dev: f64 = 0.0;
    let mut combination_min_eig = f64::INFINITY;
    let mut ok = true;
    for i in 1..=d {
        let x = sol.mat(i);
        let bound = if i < d { 2.0 } else { 1.0 };
        let top = spectrum(x)?.max_eig();
        ok &= top <= bound + psd_tolerance(x, tol);
        max_eigs.push(top);
        bounds.push(bound);

        let mut combo = SymMat::zeros(n);
        for (r, m) in constraints.iter().enumerate() {
            combo.axpy(-qinv.get(i - 1, r), m);
        }
        let want = x.scale(-1.0).shift(bound);
        combination_max_dev = combination_max_dev.max(combo.max_abs_diff(&want));
        combination_min_eig = combination_min_eig.min(spectrum(&combo)?.min_eig());
    }
    ok &= combination_max_dev <= 1e-8;
    Ok(UpperBoundReport {
        max_eigs,
        bounds,
        combination_max_dev,
        combination_min_eig,
        ok,
    })
}

pub fn derive_upper_bounds(sol: &CandidateSolution, tol: f64) -> bool {
    upper_bound_report(sol, tol).map(|r| r.ok).unwrap_or(false)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowSumReport {
    pub ok: bool,
    /// `(matrix index, row, sum)` of the first offending row.
    pub offending: Option<(usize, usize, f64)>,
}

/// `Xⁱe = 2e` for `i < d` and `Xᵈe = e`.
pub fn row_sum_report(sol: &CandidateSolution, tol: f64) -> RowSumReport {
    let d = sol.d();
    for i in 1..=d {
        let want = if i < d { 2.0 } else { 1.0 };
        for (row, sum) in sol.mat(i).row_sums().into_iter().enumerate() {
            if (sum - want).abs() > tol {
                return RowSumReport {
                    ok: false,
                    offending: Some((i, row, sum)),
                };
            }
        }
    }
    RowSumReport {
        ok: true,
        offending: None,
    }
}

pub fn row_sum_theorem_check(sol: &CandidateSolution, tol: f64) -> bool {
    row_sum_report(sol, tol).ok
}

/// Moves mass in the n-cycle adjacency so row 0 sums to `2 + 2ε` while the
/// total `eᵀXe` stays `2n`, then evaluates `vᵀXv` and `2vᵀv` at
/// `v = e + εe₁`. The first exceeds the second, so `X ⋠ 2I`.
pub fn row_sum_perturbation(n: usize, eps: f64) -> Result<(f64, f64)> {
    if n < 6 {
        return domain(format!("perturbation needs n >= 6, got {n}"));
    }
    let mut x = crate::tsp_sdp::distance_matrix(n, 1)?;
    x.set(0, 2, x.get(0, 2) + 2.0 * eps);
    x.set(2, 3, x.get(2, 3) - 2.0 * eps);
    let mut v = vec![1.0; n];
    v[0] += eps;
    let lhs = x.quadratic_form(&v);
    let rhs = 2.0 * v.iter().map(|t| t * t).sum::<f64>();
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tsp_sdp::cycle_solution;
    use crate::witness::{analytic_a, expand_family};

    #[test]
    fn six_matches_displayed_inverse() {
        let q = QMatrix::new(6).unwrap();
        assert_eq!(q.parity(), Parity::Even);
        let inv = q_inverse_closed_form(&q).unwrap();
        let want = [
            [-1.0 / 3.0, -1.0, -2.0 / 3.0],
            [-1.0, -1.0, 0.0],
            [-2.0 / 3.0, 0.0, -1.0 / 3.0],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert!((inv.get(i, j) - want[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn against_gauss_jordan() {
        for n in (5..=24).chain([63, 64]) {
            let q = QMatrix::new(n).unwrap();
            let closed = q_inverse_closed_form(&q).unwrap();
            let numeric = numeric_inverse(q.entries()).unwrap();
            for (i, row) in numeric.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    assert!((closed.get(i, j) - v).abs() < 1e-8, "n = {n}");
                }
            }
        }
    }

    #[test]
    fn row_sums_of_inverse() {
        for n in [6, 8, 10, 16] {
            let inv = q_inverse_closed_form(&QMatrix::new(n).unwrap()).unwrap();
            let d = n / 2;
            for (i, s) in inv.row_sums().into_iter().enumerate() {
                let want = if i + 1 == d { -1.0 } else { -2.0 };
                assert!((s - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn upper_bounds() {
        assert!(derive_upper_bounds(&cycle_solution(8).unwrap(), 1e-8));
        assert!(derive_upper_bounds(&expand_family(&analytic_a(6).unwrap()), 1e-8));
        let scaled = cycle_solution(6).unwrap();
        let scaled = CandidateSolution::new(scaled.mats().iter().map(|m| m.scale(1.2)).collect()).unwrap();
        let r = upper_bound_report(&scaled, 1e-8).unwrap();
        assert!(!r.ok);
        assert!((r.max_eigs[0] - 2.4).abs() < 1e-12);
    }

    #[test]
    fn row_sum_reports() {
        assert!(row_sum_theorem_check(&cycle_solution(10).unwrap(), 1e-10));
        let mut mats = cycle_solution(6).unwrap().mats().to_vec();
        mats[1].set(0, 2, 0.5);
        let r = row_sum_report(&CandidateSolution::new(mats).unwrap(), 1e-10);
        assert_eq!(r.offending, Some((2, 0, 1.5)));
    }

    #[test]
    fn perturbation_exceeds_bound() {
        let (lhs, rhs) = row_sum_perturbation(8, 0.05).unwrap();
        // 2n + 4ε + 4ε² against 2n + 4ε + 2ε²
        assert!((lhs - (16.0 + 0.2 + 0.01)).abs() < 1e-12);
        assert!((rhs - (16.0 + 0.2 + 0.005)).abs() < 1e-12);
        assert!(lhs > rhs);
    }
}
