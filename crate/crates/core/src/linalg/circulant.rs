use std::f64::consts::PI;

use super::matrix::SymMatrix;
use super::spectrum::{Spectrum, SpectrumMethod};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// First row `m_0, ..., m_{n-1}` of a circulant matrix `M[s][t] = m_{(t - s) mod n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CirculantSpec<T> {
    first_row: Vec<T>,
}

impl<T: Scalar> CirculantSpec<T> {
    pub fn new(first_row: Vec<T>) -> Result<Self> {
        if first_row.is_empty() {
            return Err(Error::Domain("circulant order must be positive".into()));
        }
        Ok(CirculantSpec { first_row })
    }

    pub fn order(&self) -> usize {
        self.first_row.len()
    }

    pub fn first_row(&self) -> &[T] {
        &self.first_row
    }

    /// Checks `m_j == m_{n-j}` to within `tol`.
    pub fn check_symmetric(&self, tol: T) -> Result<()> {
        let n = self.order();
        for j in 1..n {
            if (self.first_row[j] - self.first_row[n - j]).abs() > tol {
                return Err(Error::NonSymmetricCirculant { index: j });
            }
        }
        Ok(())
    }

    /// Materialises the matrix. Requires the first row to be exactly symmetric.
    pub fn to_matrix(&self) -> Result<SymMatrix<T>> {
        self.check_symmetric(T::zero())?;
        let n = self.order();
        Ok(SymMatrix::from_fn(n, |s, t| self.first_row[(t + n - s) % n]))
    }

    /// Reads the first row of `a` if `a` is exactly circulant.
    pub fn detect(a: &SymMatrix<T>) -> Option<Self> {
        let n = a.order();
        let first = a.row(0);
        for s in 1..n {
            let row = a.row(s);
            for t in 0..n {
                if row[t] != first[(t + n - s) % n] {
                    return None;
                }
            }
        }
        Some(CirculantSpec {
            first_row: first.to_vec(),
        })
    }
}

/// Eigenvalues `λ_t = Σ_s m_s cos(2π s t / n)` of a symmetric circulant.
///
/// The imaginary part of the DFT vanishes when `m_j = m_{n-j}`, so only the
/// real cosine sum is evaluated.
pub fn circulant_eigenvalues<T: Scalar>(spec: &CirculantSpec<T>) -> Result<Spectrum<T>> {
    let n = spec.order();
    let scale = spec
        .first_row
        .iter()
        .fold(T::one(), |acc, &v| acc.max(v.abs()));
    spec.check_symmetric(T::of(1e-12) * scale)?;
    let eigenvalues = (1..=n)
        .map(|t| {
            spec.first_row
                .iter()
                .enumerate()
                .fold(T::zero(), |acc, (s, &m)| {
                    // reduce s*t mod n first so the angle stays in [0, 2π)
                    let angle = 2.0 * PI * ((s * t) % n) as f64 / n as f64;
                    acc + m * T::of(angle.cos())
                })
        })
        .collect();
    Ok(Spectrum::new(eigenvalues, SpectrumMethod::ClosedFormCirculant))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle_laplacian_row(n: usize) -> Vec<f64> {
        let mut row = vec![0.0; n];
        row[0] = 2.0;
        row[1] = -1.0;
        row[n - 1] = -1.0;
        row
    }

    #[test]
    fn cycle_laplacian_six() {
        let spec = CirculantSpec::new(cycle_laplacian_row(6)).unwrap();
        let spectrum = circulant_eigenvalues(&spec).unwrap();
        let expected = [0.0, 1.0, 1.0, 3.0, 3.0, 4.0];
        for (got, want) in spectrum.eigenvalues().iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn identity_and_ones_rows() {
        let mut row = vec![0.0_f64; 5];
        row[0] = 1.0;
        let s = circulant_eigenvalues(&CirculantSpec::new(row).unwrap()).unwrap();
        assert!(s.eigenvalues().iter().all(|&v| (v - 1.0).abs() < 1e-12));

        let s = circulant_eigenvalues(&CirculantSpec::new(vec![1.0_f64; 4]).unwrap()).unwrap();
        let ev = s.eigenvalues();
        assert!(ev[..3].iter().all(|v| v.abs() < 1e-12));
        assert!((ev[3] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_asymmetric_row() {
        let spec = CirculantSpec::new(vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(
            circulant_eigenvalues(&spec).unwrap_err(),
            Error::NonSymmetricCirculant { index: 1 }
        );
    }

    #[test]
    fn detect_round_trip() {
        let spec = CirculantSpec::new(cycle_laplacian_row(7)).unwrap();
        let m = spec.to_matrix().unwrap();
        assert_eq!(CirculantSpec::detect(&m), Some(spec));
        let mut broken = m.clone();
        broken.set(0, 3, 0.5);
        assert_eq!(CirculantSpec::detect(&broken), None);
    }
}
