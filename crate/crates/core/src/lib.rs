//! Semi-global polynomial propagation for systems of the form
//! `u' = G(u, t) u + s(u, t)`.
//!
//! The crate is matrix-free: every generator is reached only through
//! [`operators::LinearOperator`], and every application is counted so that
//! runs can be compared by their matvec cost.
//!
//! Layout:
//!
//! - [`scalar_kernels`]: the `f_m(z, t)` family and its Chebyshev expansion
//!   over a segment of the imaginary axis.
//! - [`cheb_algebra`]: Chebyshev–Lobatto time slabs, cosine transforms,
//!   conversion to the Taylor-like source form and barycentric interpolation.
//! - [`operators`]: the operator trait, counted handles, dense operators,
//!   spectral scaling and analytic spectral bounds.
//! - [`semiglobal`]: recurrence vectors, solution evaluation, the one-shot
//!   constant-generator solver and the predictor–corrector stepper.
//! - [`reference`]: classical RK4 and Dormand–Prince 5(4).
//! - [`physics_models`]: Fourier grids and the advection, driven oscillator
//!   and Gross–Pitaevskii problems.

pub mod cheb_algebra;
pub mod error;
pub mod linalg;
pub mod operators;
pub mod physics_models;
pub mod reference;
pub mod scalar_kernels;
pub mod semiglobal;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Complex solution vector on a spatial grid or an abstract state space.
pub type StateVector = Vec<Complex64>;
