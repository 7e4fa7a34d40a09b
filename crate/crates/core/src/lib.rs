//! Conic condition numbers and their smoothed analysis over the complex numbers.
//!
//! The crate is organised in five layers:
//!
//! - [`projective`]: points, distances, volumes and exact samplers on complex
//!   projective space `CP^p` with the Fubini–Study structure.
//! - [`linalg`]: small dense complex linear algebra (SVD, Schur-based
//!   eigendecomposition with left and right vectors, pseudo-inverse,
//!   companion-matrix roots, Sylvester resultant).
//! - [`condition`]: the Frobenius condition number, its Moore–Penrose
//!   analogue, the eigenvalue condition number and `mu_norm` for homogeneous
//!   polynomial systems.
//! - [`bounds`]: log-space evaluators for the tail and expectation bounds.
//! - [`experiments`]: the seeded Monte Carlo harness that pits empirical
//!   tails and means against those bounds.
//!
//! Every random quantity is drawn from a [`rng::RandomStream`] derived from a
//! master seed and a trial index, so results do not depend on thread count.

#![forbid(unsafe_code)]

pub mod bounds;
pub mod condition;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod projective;
pub mod rng;

pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use num_complex::Complex64;
pub use projective::{BallSpec, ProjectivePoint};
pub use rng::RandomStream;

/// Complex scalar used throughout (64-bit real and imaginary parts).
pub type ComplexScalar = Complex64;
