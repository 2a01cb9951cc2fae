//! Intrinsic torsion of invariant almost quaternion-Hermitian structures on
//! Lie groups.
//!
//! A model is a Lie algebra given by structure constants in an orthonormal
//! coframe together with a hypercomplex triple `I, J, K`. From the exterior
//! derivatives of the three Kähler forms the crate computes the six
//! components of the intrinsic `Sp(n)Sp(1)`-torsion, the Gray–Hervella type
//! of each almost Hermitian structure, HKT/QKT data, conformal changes and
//! twists.
//!
//! Indices are zero-based throughout the library; coframe names are only
//! used for input and display.

pub mod classify;
pub mod corpus;
pub mod liealg;
pub mod multilinear;
pub mod structure;
pub mod torsion;
pub mod transforms;

mod error;

pub use error::{Error, Result};
pub use liealg::LieAlgebraModel;
pub use multilinear::{Endomorphism, Form, Tensor};
pub use structure::{AqhModel, HypercomplexTriple, Quat};
pub use torsion::{BetaDecomposition, TorsionFlags, TorsionReport};

/// Default relative tolerance for zero tests.
pub const DEFAULT_TOL: f64 = 1e-9;

/// `true` when `norm` is above `tol * (1 + scale)`.
pub fn is_nonzero(norm: f64, scale: f64, tol: f64) -> bool {
    norm > tol * (1.0 + scale)
}
