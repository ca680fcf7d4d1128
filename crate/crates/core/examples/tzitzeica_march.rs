//! Marches `u_xy = e^u − ε e^{−2u}` from data on the two characteristics and
//! shows the discrete residual and the Hitchin residual shrinking as `h²`.
//!
//! `cargo run --release --example tzitzeica_march -- [epsilon]`

use affsphere::gauge::{classify_real_form, hitchin_residual, TzitzeicaJet};
use affsphere::pdesolve::{tzitzeica_march, GridShape};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let eps: f64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(1.0);
    let mut last = None;
    for n in [17, 33, 65, 129] {
        let shape = GridShape::rect(n, n, 0.0, 0.5, 0.0, 0.5)?;
        let bottom: Vec<f64> = (0..n).map(|i| 0.3 * shape.x(i).sin()).collect();
        let left: Vec<f64> = (0..n).map(|j| -0.2 * shape.y(j)).collect();
        let u = tzitzeica_march(&shape, &bottom, &left, eps)?;
        let mut worst = 0.0f64;
        for (i, j) in shape.interior() {
            let jet = TzitzeicaJet {
                r: affsphere::re(eps),
                ..TzitzeicaJet::real(u.at(i, j), u.d_dx(i, j), u.d_dy(i, j), u.d_dxdy(i, j))
            };
            worst = worst.max(hitchin_residual(&jet.gauge_data())?.max_norm());
        }
        let ratio = last.map(|p: f64| p / worst).unwrap_or(f64::NAN);
        println!("n = {n:>3}: Hitchin residual {worst:.3e}  (ratio {ratio:.2})");
        last = Some(worst);
        if n == 129 {
            let (i, j) = (n / 2, n / 2);
            let jet = TzitzeicaJet {
                r: affsphere::re(eps),
                ..TzitzeicaJet::real(u.at(i, j), u.d_dx(i, j), u.d_dy(i, j), u.d_dxdy(i, j))
            };
            println!("real form at the centre: {:?}", classify_real_form(&jet.gauge_data(), 1e-9)?);
        }
    }
    Ok(())
}
