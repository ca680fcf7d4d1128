//! The gauge-invariant conditions at a single point: the affine sphere gauge
//! built from `(ψ, ψ_z, U)`, the Tzitzéica gauge, and what happens to the
//! traces under a change of frame.

use affsphere::gauge::{
    check_affine_sphere_gauge, check_tzitzeica_gauge, classify_real_form, hitchin_residual, AffineSphereJet,
    TzitzeicaJet, DEFAULT_CONDITION_TOL,
};
use affsphere::{re, CMat3, Complex64};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (psi, psi_z, u) = (0.3, Complex64::new(0.2, -0.5), Complex64::new(0.8, 0.4));
    let gd = AffineSphereJet::euclidean_on_shell(psi, psi_z, u).gauge_data()?;
    println!("affine sphere gauge at psi = {psi}, psi_z = {psi_z}, U = {u}");
    println!("  Hitchin residual {:.2e}", hitchin_residual(&gd)?.max_norm());
    let r = check_affine_sphere_gauge(&gd, DEFAULT_CONDITION_TOL)?;
    println!("  conditions: {} {} {}  (degenerate stratum: {})", r.c1, r.c2, r.c3, r.degenerate);
    println!(
        "  Tr(QQ*) = {:.6}, Tr((D_z Q*)^2) = {:.2e}, condition-3 trace = {:.2e}",
        r.tr_q_qstar,
        r.tr_dqstar_sq.norm(),
        r.c3_trace.norm()
    );

    // U = 0 is the round sphere, where the fourth-order trace degenerates
    let flat = AffineSphereJet::euclidean_on_shell(psi, psi_z, re(0.0)).gauge_data()?;
    println!("  with U = 0: degenerate = {}", check_affine_sphere_gauge(&flat, DEFAULT_CONDITION_TOL)?.degenerate);

    let tz = TzitzeicaJet::on_shell(Complex64::new(0.1, 0.2), re(0.7), re(-0.4), re(1.0), re(1.0)).gauge_data();
    let g = CMat3::from_real([[1.0, 0.5, 0.0], [0.0, 1.0, -0.3], [0.2, 0.0, 1.0]]);
    let (a, b) = (
        check_tzitzeica_gauge(&tz, DEFAULT_CONDITION_TOL)?,
        check_tzitzeica_gauge(&tz.conjugate(&g)?, DEFAULT_CONDITION_TOL)?,
    );
    println!("tzitzeica gauge: conditions {}, after conjugation {}", a.all(), b.all());
    println!("  Tr(PQ) {:.6} -> {:.6}", a.tr_pq, b.tr_pq);

    let real = TzitzeicaJet::real(0.4, 0.1, -0.3, 0.4f64.exp() - (-0.8f64).exp()).gauge_data();
    println!("real slice classified as {:?}", classify_real_form(&real, 1e-9)?);
    Ok(())
}
