//! Solves the affine sphere equation with `U = 0` on a square and compares
//! with the round sphere `e^ψ = 4/(1+|z|²)²`.
//!
//! `cargo run --release --example liouville -- [half-width] [nodes]`

use affsphere::pdesolve::{
    affine_sphere_residual, harmonic_extension, liouville_psi, solve_affine_sphere, CubicDifferential, GridShape,
    NewtonOptions, ScalarGrid,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let a: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0.25);
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(65);

    let shape = GridShape::rect(n, n, -a, a, -a, a)?;
    let exact = ScalarGrid::from_z(shape, liouville_psi);
    let init = harmonic_extension(&exact)?;
    let opts = NewtonOptions { tol: 1e-12, ..Default::default() };
    let (psi, stats) = solve_affine_sphere(&CubicDifferential::Zero, &exact, &init, &opts)?;

    println!("grid {n}x{n} on [-{a}, {a}]^2");
    println!("newton iterations {}, final residual {:.3e}", stats.iterations, stats.final_residual());
    println!("sup |psi - exact| = {:.3e}", psi.max_diff(&exact)?);
    let tr = affine_sphere_residual(&exact, &CubicDifferential::Zero)?;
    println!("truncation residual of the closed form = {:.3e}", tr.max_abs());
    Ok(())
}
