use super::matrix::SymMatrix;
use super::spectrum::{Spectrum, SpectrumMethod};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Rotation budget per unit of `n²`.
const ROTATIONS_PER_ENTRY: usize = 100;

/// Eigenvalues of a symmetric matrix by classical (largest-pivot) Jacobi rotations.
///
/// The pivot is the off-diagonal entry of largest magnitude; ties go to the
/// lowest row, then the lowest column, so the rotation sequence is a pure
/// function of the input. Iteration stops once every off-diagonal entry is at
/// most `tol / n`, which bounds the off-diagonal Frobenius norm by `tol`.
pub fn jacobi_eigenvalues<T: Scalar>(a: &SymMatrix<T>, tol: T) -> Result<Spectrum<T>> {
    jacobi_with_budget(a, tol, ROTATIONS_PER_ENTRY * a.order() * a.order())
}

fn jacobi_with_budget<T: Scalar>(a: &SymMatrix<T>, tol: T, budget: usize) -> Result<Spectrum<T>> {
    assert!(tol > T::zero(), "jacobi tolerance must be positive");
    let n = a.order();
    let mut m: Vec<T> = a.as_slice().to_vec();
    if n == 1 {
        return Ok(Spectrum::new(m, SpectrumMethod::Jacobi));
    }

    let threshold = tol / T::of_usize(n);
    let mut row_max: Vec<usize> = (0..n - 1).map(|r| scan_row(&m, n, r)).collect();

    let mut rotations = 0;
    loop {
        // Global pivot from the per-row cache; strict comparison keeps the lowest row.
        let mut p = 0;
        let mut best = T::zero();
        for (r, &c) in row_max.iter().enumerate() {
            let v = m[r * n + c].abs();
            if v > best {
                best = v;
                p = r;
            }
        }
        if best <= threshold {
            break;
        }
        if rotations == budget {
            return Err(Error::NoConvergence {
                rotations,
                off_norm: off_norm(&m, n).to_f64_lossy(),
            });
        }
        let q = row_max[p];
        rotate(&mut m, n, p, q);
        rotations += 1;

        row_max[p] = scan_row(&m, n, p);
        if q < n - 1 {
            row_max[q] = scan_row(&m, n, q);
        }
        for r in 0..n - 1 {
            if r == p || r == q {
                continue;
            }
            let cached = row_max[r];
            if cached == p || cached == q {
                row_max[r] = scan_row(&m, n, r);
                continue;
            }
            // Only entries (r, p) and (r, q) of this row moved.
            let mut cur = cached;
            for c in [p, q] {
                if c > r {
                    let v = m[r * n + c].abs();
                    let w = m[r * n + cur].abs();
                    if v > w || (v == w && c < cur) {
                        cur = c;
                    }
                }
            }
            row_max[r] = cur;
        }
    }

    let eigenvalues = (0..n).map(|i| m[i * n + i]).collect();
    Ok(Spectrum::new(eigenvalues, SpectrumMethod::Jacobi))
}

/// Tolerance used when callers do not pick one: a small multiple of machine
/// epsilon scaled by the order and magnitude of the matrix.
pub fn default_jacobi_tol<T: Scalar>(a: &SymMatrix<T>) -> T {
    T::epsilon() * T::of(16.0) * T::of_usize(a.order()) * (T::one() + a.max_abs())
}

fn scan_row<T: Scalar>(m: &[T], n: usize, r: usize) -> usize {
    let mut best = r + 1;
    let mut best_v = m[r * n + best].abs();
    for c in (r + 2)..n {
        let v = m[r * n + c].abs();
        if v > best_v {
            best = c;
            best_v = v;
        }
    }
    best
}

fn off_norm<T: Scalar>(m: &[T], n: usize) -> T {
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s = s + m[i * n + j] * m[i * n + j];
            }
        }
    }
    s.sqrt()
}

/// Applies the rotation in the (p, q) plane that annihilates `m[p][q]`.
fn rotate<T: Scalar>(m: &mut [T], n: usize, p: usize, q: usize) {
    let apq = m[p * n + q];
    let app = m[p * n + p];
    let aqq = m[q * n + q];
    let two = T::of(2.0);
    let tau = (aqq - app) / (two * apq);
    let t = if tau >= T::zero() {
        T::one() / (tau + (T::one() + tau * tau).sqrt())
    } else {
        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;

    for r in 0..n {
        if r == p || r == q {
            continue;
        }
        let arp = m[r * n + p];
        let arq = m[r * n + q];
        let new_rp = c * arp - s * arq;
        let new_rq = s * arp + c * arq;
        m[r * n + p] = new_rp;
        m[p * n + r] = new_rp;
        m[r * n + q] = new_rq;
        m[q * n + r] = new_rq;
    }
    m[p * n + p] = app - t * apq;
    m[q * n + q] = aqq + t * apq;
    m[p * n + q] = T::zero();
    m[q * n + p] = T::zero();
}
