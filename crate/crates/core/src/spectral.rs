//! The single-matrix relaxation `2I − X + h_n(J − I) ⪰ 0` and its reduction
//! to the algebraic connectivity of the weighted graph `X`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{psd_tolerance, spectrum};
use crate::tsp_sdp::SdpInstance;
use crate::SymMat;

/// Row-sum tolerance used by [`laplacian`].
pub const ROW_SUM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub row_sum_ok: bool,
    pub diag_ok: bool,
    pub entry_bound_ok: bool,
    /// Second-smallest eigenvalue of `2I − X`.
    pub lambda2: f64,
    pub h_n: f64,
    /// Minimum eigenvalue of `2I − X + h_n(J − I)`.
    pub direct_min_eig: f64,
    pub feasible: bool,
}

/// `2I − X`, for `X` with every row summing to 2.
pub fn laplacian(x: &SymMat) -> Result<SymMat> {
    for (row, sum) in x.row_sums().into_iter().enumerate() {
        if (sum - 2.0).abs() > ROW_SUM_TOL {
            return Err(Error::RowSum { row, sum });
        }
    }
    Ok(x.scale(-1.0).shift(2.0))
}

/// `2 − 2cos(2π/n)`, the algebraic connectivity of the n-cycle.
pub fn h_value(n: usize) -> f64 {
    assert!(n >= 3, "h_value needs n >= 3");
    2.0 - 2.0 * (2.0 * PI / n as f64).cos()
}

/// Checks `Xe = 2e`, `diag(X) = 0`, `X_ij ≤ 1` and the PSD condition, the
/// latter both directly and through `λ₂(2I − X) ≥ h_n`.
///
/// On `e⊥` the two matrices differ by `h_n I`, and `e` itself is an
/// eigenvector of the shifted matrix with eigenvalue `(n − 1) h_n > 0`, so the
/// two verdicts coincide whenever the row sums are exact.
pub fn verify_cvetkovic(inst: &SdpInstance, x: &SymMat, tol: f64) -> Result<SpectralReport> {
    let n = inst.n();
    if x.order() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.order(),
        });
    }
    let row_sum_ok = x.row_sums().iter().all(|s| (s - 2.0).abs() <= tol);
    let diag_ok = (0..n).all(|i| x.get(i, i).abs() <= tol);
    let entry_bound_ok = x.as_slice().iter().all(|&v| v <= 1.0 + tol);
    let h_n = h_value(n);

    let lap = x.scale(-1.0).shift(2.0);
    let lap_spec = spectrum(&lap)?;
    let ev = lap_spec.eigenvalues();
    let lambda2 = ev[1];

    let mut shifted = lap.clone();
    shifted.axpy(h_n, &(&SymMat::all_ones(n) - &SymMat::identity(n)));
    let direct_min_eig = spectrum(&shifted)?.min_eig();
    let eig_tol = psd_tolerance(&shifted, tol);
    let direct_ok = direct_min_eig >= -eig_tol;

    let feasible = row_sum_ok && diag_ok && entry_bound_ok && lambda2 >= h_n - eig_tol;

    // The reduction only applies when e spans the kernel, i.e. the smallest
    // eigenvalue is the zero belonging to e.
    if row_sum_ok && ev[0].abs() <= eig_tol {
        let reduced = lambda2 - h_n;
        let reduced_ok = reduced >= -eig_tol;
        let predicted = reduced.min((n as f64 - 1.0) * h_n);
        if direct_ok != reduced_ok && (direct_min_eig - predicted).abs() > eig_tol {
            return Err(Error::VerdictMismatch {
                direct: direct_min_eig,
                reduced,
            });
        }
    }

    Ok(SpectralReport {
        row_sum_ok,
        diag_ok,
        entry_bound_ok,
        lambda2,
        h_n,
        direct_min_eig,
        feasible: feasible && direct_ok,
    })
}
