//! Dense symmetric linear algebra, generic over the scalar type.

pub mod circulant;
pub mod csv;
pub mod jacobi;
pub mod matrix;
pub mod spectrum;

pub use circulant::{circulant_eigenvalues, CirculantSpec};
pub use jacobi::{default_jacobi_tol, jacobi_eigenvalues};
pub use matrix::{all_ones, identity, kron, SymMatrix};
pub use spectrum::{psd_check, psd_tolerance, spectrum, BlockKron, Spectrum, SpectrumMethod};
