//! Generalized impedance boundary conditions (GIBCs) for time-harmonic
//! Maxwell scattering by a highly conducting obstacle.
//!
//! The crate is organized bottom-up:
//!
//! - [`specfun`]: spherical Bessel/Hankel/Riccati–Bessel functions of complex argument.
//! - [`geometry`]: curvature tensors, the Jacobian of the normal-coordinate map and
//!   the curl operator in local surface coordinates.
//! - [`polyexp`]: exact algebra of boundary-layer profiles `p(eta)·exp(-sqrt(i)·eta)`.
//! - [`blprofiles`]: the boundary-layer recursion over a finite surface-symbol algebra.
//! - [`gibc_symbols`]: per-mode symbols of the impedance operators of orders 0 to 3.
//! - [`modal`]: exact and GIBC solutions of the concentric-sphere problem, expansion
//!   terms, H(curl) error norms and convergence-rate studies.
//! - [`golden`]: symbolic reference profiles embedded for the command-line checks.
//! - [`quadrature`]: Gauss–Legendre radial rules.

pub mod blprofiles;
pub mod error;
pub mod geometry;
pub mod gibc_symbols;
pub mod golden;
pub mod modal;
pub mod polyexp;
pub mod quadrature;
pub mod specfun;

pub use error::{Error, Result};
pub use num_complex::Complex64;
