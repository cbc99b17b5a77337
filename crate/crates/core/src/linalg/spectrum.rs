use serde::Serialize;

use super::circulant::{circulant_eigenvalues, CirculantSpec};
use super::jacobi::{default_jacobi_tol, jacobi_eigenvalues};
use super::matrix::SymMatrix;
use crate::error::Result;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumMethod {
    ClosedFormCirculant,
    ClosedFormKronecker,
    Jacobi,
}

/// Eigenvalues of a symmetric matrix, sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    eigenvalues: Vec<T>,
    method: SpectrumMethod,
}

impl<T: Scalar> Spectrum<T> {
    pub fn new(mut eigenvalues: Vec<T>, method: SpectrumMethod) -> Self {
        assert!(!eigenvalues.is_empty());
        eigenvalues.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
        Spectrum {
            eigenvalues,
            method,
        }
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn min_eig(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn max_eig(&self) -> T {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    pub fn method(&self) -> SpectrumMethod {
        self.method
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn sum(&self) -> T {
        self.eigenvalues.iter().fold(T::zero(), |acc, &v| acc + v)
    }

    /// Largest elementwise gap between two sorted spectra of equal length.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.len(), other.len());
        self.eigenvalues
            .iter()
            .zip(&other.eigenvalues)
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()))
    }

    /// Compares against an unsorted expected multiset.
    pub fn matches_multiset(&self, expected: &[T], tol: T) -> bool {
        if expected.len() != self.len() {
            return false;
        }
        let other = Spectrum::new(expected.to_vec(), self.method);
        self.max_abs_diff(&other) <= tol
    }
}

/// `a = alpha * I + B ⊗ J_m`, with `B` of order `p` and `n = p * m`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockKron<T> {
    pub alpha: T,
    pub block: SymMatrix<T>,
    pub block_size: usize,
}

impl<T: Scalar> BlockKron<T> {
    /// Looks for the structure with the largest block size `m >= 2` dividing `n`.
    /// Entries are compared exactly.
    pub fn detect(a: &SymMatrix<T>) -> Option<Self> {
        let n = a.order();
        (2..=n)
            .rev()
            .filter(|m| n.is_multiple_of(*m))
            .find_map(|m| Self::detect_with(a, m))
    }

    pub fn detect_with(a: &SymMatrix<T>, m: usize) -> Option<Self> {
        let n = a.order();
        if m < 2 || !n.is_multiple_of(m) {
            return None;
        }
        let p = n / m;
        let mut block = vec![vec![T::zero(); p]; p];
        for (bi, row) in block.iter_mut().enumerate() {
            for (bj, slot) in row.iter_mut().enumerate() {
                // off-diagonal representative inside block (bi, bj)
                *slot = a.get(bi * m, bj * m + 1);
            }
        }
        let alpha = a.get(0, 0) - block[0][0];
        for i in 0..n {
            let bi = i / m;
            let r = a.row(i);
            for (j, &v) in r.iter().enumerate() {
                let want = if i == j {
                    alpha + block[bi][bi]
                } else {
                    block[bi][j / m]
                };
                if v != want {
                    return None;
                }
            }
        }
        Some(BlockKron {
            alpha,
            block: SymMatrix::from_rows(&block).ok()?,
            block_size: m,
        })
    }

    pub fn to_matrix(&self) -> SymMatrix<T> {
        let m = self.block_size;
        let n = self.block.order() * m;
        SymMatrix::from_fn(n, |i, j| {
            let v = self.block.get(i / m, j / m);
            if i == j {
                v + self.alpha
            } else {
                v
            }
        })
    }

    /// `alpha + m·λ(B)` for each eigenvalue of `B`, and `alpha` with
    /// multiplicity `p(m − 1)` from the kernel of `J_m`.
    pub fn eigenvalues(&self) -> Result<Spectrum<T>> {
        let m = self.block_size;
        let p = self.block.order();
        let inner = spectrum(&self.block)?;
        let mut values: Vec<T> = inner
            .eigenvalues()
            .iter()
            .map(|&mu| self.alpha + T::of_usize(m) * mu)
            .collect();
        values.extend(std::iter::repeat_n(self.alpha, p * (m - 1)));
        Ok(Spectrum::new(values, SpectrumMethod::ClosedFormKronecker))
    }
}

/// Spectrum with structure dispatch: exact circulant, then exact
/// `alpha I + B ⊗ J`, then Jacobi.
pub fn spectrum<T: Scalar>(a: &SymMatrix<T>) -> Result<Spectrum<T>> {
    if a.order() > 1 {
        if let Some(spec) = CirculantSpec::detect(a) {
            return circulant_eigenvalues(&spec);
        }
        if let Some(bk) = BlockKron::detect(a) {
            return bk.eigenvalues();
        }
    }
    jacobi_eigenvalues(a, default_jacobi_tol(a))
}

/// PSD test: `is_psd` iff the minimum eigenvalue is at least `-tol`.
pub fn psd_check<T: Scalar>(a: &SymMatrix<T>, tol: T) -> Result<(bool, T)> {
    let min_eig = spectrum(a)?.min_eig();
    Ok((min_eig >= -tol, min_eig))
}

/// Default absolute PSD tolerance scaled by the matrix magnitude.
pub fn psd_tolerance<T: Scalar>(a: &SymMatrix<T>, base: T) -> T {
    base * (T::one() + a.max_abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::kron;

    type M = SymMatrix<f64>;

    #[test]
    fn psd_examples() {
        assert_eq!(psd_check(&M::identity(4), 0.0).unwrap(), (true, 1.0));
        let (ok, min) = psd_check(&M::identity(2).scale(-1.0), 1e-9).unwrap();
        assert!(!ok);
        assert!((min + 1.0).abs() < 1e-14);
        let jm = &M::all_ones(3) - &M::identity(3);
        let (ok, min) = psd_check(&jm, 0.0).unwrap();
        assert!(!ok);
        assert!((min + 1.0).abs() < 1e-12);
    }

    #[test]
    fn ones_has_single_nonzero_eigenvalue() {
        let s = spectrum(&M::all_ones(3)).unwrap();
        assert!(s.matches_multiset(&[3.0, 0.0, 0.0], 1e-12));
    }

    #[test]
    fn block_kron_detect_and_spectrum() {
        let b = M::from_rows(&[vec![0.75, 1.0 / 6.0], vec![1.0 / 6.0, 0.75]]).unwrap();
        let a = kron(&b, &M::all_ones(3)).shift(-0.75);
        let bk = BlockKron::detect(&a).unwrap();
        assert_eq!(bk.block_size, 3);
        assert_eq!(bk.to_matrix(), a);
        let closed = bk.eigenvalues().unwrap();
        let jac = jacobi_eigenvalues(&a, 1e-13).unwrap();
        assert!(closed.max_abs_diff(&jac) < 1e-12);
        assert_eq!(closed.method(), SpectrumMethod::ClosedFormKronecker);
    }

    #[test]
    fn dispatcher_falls_back_to_jacobi() {
        let a = M::from_fn(4, |i, j| (i + 2 * j) as f64 * 0.1 + (j + 2 * i) as f64 * 0.1);
        assert_eq!(spectrum(&a).unwrap().method(), SpectrumMethod::Jacobi);
    }
}
