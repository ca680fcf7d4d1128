//! Integrates the frame `(f, f_z, f_z̄)` of the affine sphere over a square
//! from Liouville data and compares the immersion with the unit sphere.

use affsphere::geometry::{cone_point, integrate_frame, loop_defect, sphere_frame};
use affsphere::pdesolve::{liouville_psi, CubicDifferential, GridShape, ScalarGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let u = CubicDifferential::Zero;
    for n in [17, 33, 65] {
        let shape = GridShape::rect(n, n, -0.5, 0.5, -0.5, 0.5)?;
        let psi = ScalarGrid::from_z(shape, liouville_psi);
        let n0 = sphere_frame(shape.z(0, 0));
        let frame = integrate_frame(&psi, &u, n0, (0, 0))?;
        let mut radial = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                let f = frame.immersion(i, j);
                radial = radial.max(((f[0] * f[0] + f[1] * f[1] + f[2] * f[2]).sqrt() - 1.0).abs());
            }
        }
        let ld = loop_defect(&psi, &u, n0, (0, 0), (n - 1, n - 1))?;
        println!(
            "n = {n:>2}: max ||f| - 1| = {radial:.2e}, loop defect {ld:.2e}, max |Im f| = {:.1e}",
            frame.max_imag_f()
        );
    }
    // z = 0 is the south pole of the round sphere
    let south = sphere_frame(affsphere::re(0.0));
    println!("cone point over z = 0 at r = 2: {:?}", cone_point(&south, 2.0));
    Ok(())
}
