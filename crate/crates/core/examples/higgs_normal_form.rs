//! Any pair of square-zero matrices with `Tr(PQ) ≠ 0` is conjugate to
//! `(E13, ω E31)`.

use affsphere::matalg3::normalize_higgs_pair;
use affsphere::{CMat3, Complex64};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = CMat3::from_real([[1.0, 2.0, 0.0], [0.0, 1.0, 1.0], [1.0, 0.0, 1.0]]);
    let gi = g.inverse().ok_or("singular")?;
    let p = CMat3::unit(1, 3).conjugate_by(&gi, &g);
    let q = (CMat3::unit(3, 1) * Complex64::new(0.5, 0.2)).conjugate_by(&gi, &g);
    let nf = normalize_higgs_pair(&p, &q, 1e-12)?;
    let hi = nf.g.inverse().ok_or("singular")?;
    println!("omega = Tr(PQ) = {:.6}", nf.omega);
    println!("det g = {:.6}", nf.g.det());
    println!("|g^-1 P g - E13| = {:.1e}", p.conjugate_by(&nf.g, &hi).dist(&CMat3::unit(1, 3)));
    println!("|g^-1 Q g - omega E31| = {:.1e}", q.conjugate_by(&nf.g, &hi).dist(&(CMat3::unit(3, 1) * nf.omega)));
    Ok(())
}
