//! Grids, the affine sphere solver, Goursat marching for the Tzitzéica and
//! Toda equations, travelling waves and the `n = 3` radial first integral.

mod affine;
mod cubic;
mod grid;
mod march;
mod radial;
mod wave;

pub use affine::{
    affine_sphere_residual, harmonic_extension, liouville_psi, solve_affine_sphere, NewtonOptions, NewtonStats,
    OVERFLOW_GUARD, STEP_FLOOR,
};
pub use cubic::CubicDifferential;
pub use grid::{Chart, GridShape, ScalarGrid};
pub use march::{goursat_march, toda_march, tzitzeica_march, tzitzeica_march_forced, tzitzeica_residual_grid};
pub use radial::{
    derivative_nonuniform, first_integral_value, integrate_radial_n3, radial_n3_first_integral, radial_n3_residual,
};
pub use wave::{
    energy as wave_energy, lift_offset, lift_to_grid, potential as wave_potential, travelling_wave_profile,
    WaveProfile, WaveSpec, LIFT_SCALE,
};

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PdeError {
    #[error("cubic differential is singular at z = {z}")]
    SingularU { z: Complex64 },
    #[error("Newton did not converge: {iterations} iterations, residual {residual:e}")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("Newton Jacobian singular at iteration {iteration} (pivot {pivot})")]
    SingularJacobian { iteration: usize, pivot: usize },
    #[error("solution exceeded the overflow guard at node ({i}, {j})")]
    Blowup { i: usize, j: usize },
    #[error("f0 = {f0} lies in the forbidden region: V(f0) = {potential} > E = {energy}")]
    ForbiddenRegion { f0: f64, energy: f64, potential: f64 },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("characteristic data disagree at the corner by {0:e}")]
    IncompatibleCorner(f64),
    #[error("invalid grid: {0}")]
    BadGrid(String),
    #[error("ODE integration failed: {0}")]
    Ode(String),
}
