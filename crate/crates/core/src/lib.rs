//! Numerical toolkit for definite affine spheres and the structures built on
//! them: the holomorphic Hitchin system and its gauge-invariant
//! characterisation, finite-difference solvers for the affine sphere and
//! Tzitzéica equations, the radial reduction to Painlevé III with its 3×3
//! isomonodromic Lax pair, the semi-flat Calabi–Yau coframe, and the
//! Hessian/Legendre picture of the Tzitzéica condition.
//!
//! Runnable walkthroughs live in `examples/`; the `affsphere` binary wraps the
//! same entry points for file-producing experiments.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod banded;
pub mod cli;
pub mod gauge;
pub mod geometry;
pub mod hessian;
pub mod io;
pub mod matalg3;
pub mod ode;
pub mod painleve;
pub mod pdesolve;
pub mod plot;

pub use matalg3::{CMat3, Eta};
pub use num_complex::Complex64;

use thiserror::Error;

/// Umbrella error for code that crosses module boundaries.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Mat(#[from] matalg3::MatError),
    #[error(transparent)]
    Gauge(#[from] gauge::GaugeError),
    #[error(transparent)]
    Pde(#[from] pdesolve::PdeError),
    #[error(transparent)]
    Painleve(#[from] painleve::PainleveError),
    #[error(transparent)]
    Geometry(#[from] geometry::GeometryError),
    #[error(transparent)]
    Hessian(#[from] hessian::HessianError),
    #[error(transparent)]
    Io(#[from] io::IoError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// `i`, spelled once.
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Shorthand for a real complex number.
#[inline]
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}
