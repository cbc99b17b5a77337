//! Integrality-gap witnesses for the association-scheme SDP relaxation of the
//! travelling salesman problem and its k-cycle-cover variant.
//!
//! The dense linear algebra in [`linalg`] is generic over [`Scalar`]; the
//! relaxation-specific modules work in `f64` through the aliases below.

pub mod appendix;
pub mod checks;
pub mod error;
pub mod kcycle;
pub mod linalg;
pub mod lp_bridge;
pub mod polytope;
pub mod scalar;
pub mod spectral;
pub mod tsp_sdp;
pub mod witness;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type SymMat = linalg::SymMatrix<f64>;
pub type Spectrum = linalg::Spectrum<f64>;
pub type CirculantSpec = linalg::CirculantSpec<f64>;
