//! Spectral toolkit for two-dimensional magnetic Neumann operators.
//!
//! - [`degennes`]: the half-line family −∂ₜ² + (t−ξ)², μⱼ(ξ), Θ₀.
//! - [`projectors`]: Landau-level and half-plane eigenprojector kernels.
//! - [`semiclassics`]: boundary geometry and the edge coefficients.
//! - [`models2d`]: exact cylinder energies, disk spectra, Riesz means.
//! - [`harness`]: h-sweeps, extrapolation, variational checks.

pub mod degennes;
pub mod error;
pub mod harness;
pub mod interp;
pub mod models2d;
pub mod projectors;
pub mod quadrature;
pub mod semiclassics;
pub mod tridiag;

pub use error::{Error, Result};
