use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense real symmetric matrix stored row-major.
///
/// Symmetry is exact: every constructor either mirrors the upper triangle or
/// rejects asymmetric input, and [`SymMatrix::set`] writes both halves.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<T> {
    order: usize,
    data: Vec<T>,
}

impl<T: Scalar> SymMatrix<T> {
    /// Builds a matrix from `f(i, j)` evaluated on the upper triangle (`i <= j`).
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        assert!(order >= 1, "matrix order must be positive");
        let mut data = vec![T::zero(); order * order];
        for i in 0..order {
            for j in i..order {
                let v = f(i, j);
                data[i * order + j] = v;
                data[j * order + i] = v;
            }
        }
        SymMatrix { order, data }
    }

    pub fn zeros(order: usize) -> Self {
        Self::from_fn(order, |_, _| T::zero())
    }

    pub fn identity(order: usize) -> Self {
        Self::from_fn(order, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn all_ones(order: usize) -> Self {
        Self::from_fn(order, |_, _| T::one())
    }

    /// Diagonal matrix.
    pub fn diagonal(values: &[T]) -> Self {
        Self::from_fn(values.len(), |i, j| if i == j { values[i] } else { T::zero() })
    }

    /// Validates exact symmetry of a square row list.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let order = rows.len();
        if order == 0 {
            return Err(Error::Domain("matrix order must be positive".into()));
        }
        for row in rows {
            if row.len() != order {
                return Err(Error::DimensionMismatch {
                    expected: order,
                    found: row.len(),
                });
            }
        }
        for i in 0..order {
            for j in (i + 1)..order {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(SymMatrix {
            order,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    /// Wraps a row-major buffer, checking symmetry.
    pub fn from_row_major(order: usize, data: Vec<T>) -> Result<Self> {
        if order == 0 || data.len() != order * order {
            return Err(Error::DimensionMismatch {
                expected: order * order,
                found: data.len(),
            });
        }
        for i in 0..order {
            for j in (i + 1)..order {
                if data[i * order + j] != data[j * order + i] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(SymMatrix { order, data })
    }

    /// Upper triangle was filled by the caller; mirror it down.
    pub(crate) fn from_upper_buffer(order: usize, mut data: Vec<T>) -> Self {
        debug_assert_eq!(data.len(), order * order);
        for i in 0..order {
            for j in (i + 1)..order {
                data[j * order + i] = data[i * order + j];
            }
        }
        SymMatrix { order, data }
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.order + j]
    }

    /// Sets entries `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.order + j] = v;
        self.data[j * self.order + i] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.order..(i + 1) * self.order]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    pub fn trace(&self) -> T {
        (0..self.order).fold(T::zero(), |acc, i| acc + self.get(i, i))
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &v| acc.max(v.abs()))
    }

    pub fn row_sums(&self) -> Vec<T> {
        self.data
            .chunks(self.order)
            .map(|r| r.iter().fold(T::zero(), |acc, &v| acc + v))
            .collect()
    }

    pub fn scale(&self, c: T) -> Self {
        self.map(|v| v * c)
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        SymMatrix {
            order: self.order,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `self + c * I`.
    pub fn shift(&self, c: T) -> Self {
        let mut out = self.clone();
        for i in 0..self.order {
            out.data[i * self.order + i] = out.data[i * self.order + i] + c;
        }
        out
    }

    /// `self + c * other`, in place.
    pub fn axpy(&mut self, c: T, other: &Self) {
        assert_eq!(self.order, other.order);
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + c * b;
        }
    }

    /// Frobenius inner product `tr(self * other)` for symmetric arguments.
    pub fn inner(&self, other: &Self) -> T {
        assert_eq!(self.order, other.order);
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.order);
        self.data
            .chunks(self.order)
            .map(|r| r.iter().zip(v).fold(T::zero(), |acc, (&a, &b)| acc + a * b))
            .collect()
    }

    /// `vᵀ A v`.
    pub fn quadratic_form(&self, v: &[T]) -> T {
        self.mul_vec(v)
            .iter()
            .zip(v)
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.order, other.order);
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()))
    }

    /// `Pᵀ A P` where `perm[i]` is the new label of vertex `i`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.order);
        let mut data = vec![T::zero(); self.data.len()];
        for i in 0..self.order {
            for j in 0..self.order {
                data[perm[i] * self.order + perm[j]] = self.get(i, j);
            }
        }
        SymMatrix {
            order: self.order,
            data,
        }
    }

    /// Principal submatrix on the given indices.
    pub fn principal_submatrix(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), |i, j| self.get(idx[i], idx[j]))
    }
}

impl<T: Scalar> Add for &SymMatrix<T> {
    type Output = SymMatrix<T>;
    fn add(self, rhs: Self) -> SymMatrix<T> {
        assert_eq!(self.order, rhs.order);
        SymMatrix {
            order: self.order,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<T: Scalar> Sub for &SymMatrix<T> {
    type Output = SymMatrix<T>;
    fn sub(self, rhs: Self) -> SymMatrix<T> {
        assert_eq!(self.order, rhs.order);
        SymMatrix {
            order: self.order,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

/// Dense product of two symmetric matrices. The result is generally not
/// symmetric, so it comes back as plain rows.
impl<T: Scalar> Mul for &SymMatrix<T> {
    type Output = Vec<Vec<T>>;
    fn mul(self, rhs: Self) -> Vec<Vec<T>> {
        assert_eq!(self.order, rhs.order);
        let n = self.order;
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).fold(T::zero(), |acc, k| acc + self.get(i, k) * rhs.get(k, j)))
                    .collect()
            })
            .collect()
    }
}

pub fn identity<T: Scalar>(n: usize) -> SymMatrix<T> {
    SymMatrix::identity(n)
}

pub fn all_ones<T: Scalar>(n: usize) -> SymMatrix<T> {
    SymMatrix::all_ones(n)
}

/// Kronecker product: block `(i, j)` of the result is `a[i][j] * b`.
pub fn kron<T: Scalar>(a: &SymMatrix<T>, b: &SymMatrix<T>) -> SymMatrix<T> {
    let q = b.order();
    SymMatrix::from_fn(a.order() * q, |r, c| {
        a.get(r / q, c / q) * b.get(r % q, c % q)
    })
}
