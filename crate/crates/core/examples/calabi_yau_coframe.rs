//! The semi-flat Calabi–Yau structure over an affine sphere: metric,
//! Kähler form, complex structure and volume form at one point, then the
//! exterior derivatives of `ω` and `Ω` on a grid.

use affsphere::geometry::{
    assemble_g_omega, complex_structure, cy_coframe, su3_structure_residuals, volume_ratio, SampleBox,
};
use affsphere::pdesolve::{liouville_psi, CubicDifferential, GridShape, ScalarGrid};
use affsphere::{re, Complex64};
use nalgebra::Matrix6;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let z = Complex64::new(0.1, -0.2);
    let psi = liouville_psi(z);
    let psi_z = -2.0 * z.conj() / (1.0 + z.norm_sqr());
    let cs = cy_coframe(z, Complex64::new(1.0, 0.3), Complex64::new(-0.2, 0.1), psi, psi_z, re(0.0));
    let (g, om) = assemble_g_omega(&cs)?;
    let j = complex_structure(&cs)?;
    let mut ev: Vec<f64> = g.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    println!("metric eigenvalues {ev:.4?}");
    println!(
        "|J^2 + 1| = {:.1e}, |omega - J^T g| = {:.1e}",
        (j * j + Matrix6::identity()).abs().max(),
        (om - j.transpose() * g).abs().max()
    );
    println!("Omega^Omegabar / omega^3 = {:.6}", volume_ratio(&cs)?);

    for (label, bump) in [("solution", 0.0), ("perturbed", 0.05)] {
        for n in [17, 33, 65] {
            let shape = GridShape::rect(n, n, -0.5, 0.5, -0.5, 0.5)?;
            let psi = ScalarGrid::from_xy(shape, |x, y| {
                liouville_psi(Complex64::new(x, y))
                    + bump * (std::f64::consts::PI * (x + 0.5)).sin() * (std::f64::consts::PI * (y + 0.5)).sin()
            });
            let r = su3_structure_residuals(&psi, &CubicDifferential::Zero, &SampleBox::default())?;
            println!("{label:>9} n = {n:>2}: |d omega| {:.2e}, |d Omega| {:.2e}", r.d_omega, r.d_big_omega);
        }
    }
    Ok(())
}
