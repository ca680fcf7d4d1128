//! Gauge-invariant characterisation of the affine sphere and Tzitzéica
//! gauges, and the sign that separates the real forms.
//!
//! Each check reports the raw traces next to the booleans. A trace counts as
//! zero when it is at most `tol` times the natural size of the product it
//! came from (product of max-norms of the factors), so that the verdicts
//! are unchanged by constant gauge transformations and coordinate scalings.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{GaugeData, GaugeError, RealityMode};
use crate::matalg3::{min_poly_is_t2, star, CMat3};

pub const DEFAULT_CONDITION_TOL: f64 = 1e-9;

fn is_zero(v: Complex64, scale: f64, tol: f64) -> bool {
    v.norm() <= tol * scale
}

fn is_nonzero(v: Complex64, scale: f64, tol: f64) -> bool {
    v.norm() > tol * scale && v.norm() > 0.0
}

fn norms(ms: &[&CMat3]) -> f64 {
    ms.iter().map(|m| m.norm_max()).product::<f64>() * 3f64.powi(ms.len() as i32 - 1)
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AffineSphereGaugeReport {
    pub mode: RealityMode,
    pub tol: f64,
    /// `Q² = 0`, `Q ≠ 0`, `Tr(QQ*) ≠ 0`.
    pub c1: bool,
    /// `Tr((D_zQ*)²) = 0`, `Tr((D_zQ*)²(D_z̄Q)²) ≠ 0`.
    pub c2: bool,
    /// Trace identity of degree eight.
    pub c3: bool,
    pub tr_q_qstar: Complex64,
    pub tr_dqstar_sq: Complex64,
    pub tr_dqstar_sq_dq_sq: Complex64,
    pub c3_trace: Complex64,
    /// `Tr((D_zQ*)²(D_z̄Q)²)` vanishes: the `U = 0` (Liouville) stratum.
    pub degenerate: bool,
}

impl AffineSphereGaugeReport {
    pub fn all(&self) -> bool {
        self.c1 && self.c2 && self.c3
    }
}

/// Conditions for an `su(2,1)` Hitchin configuration to be gauge and
/// coordinate equivalent to the affine sphere gauge.
///
/// `Q* = star(Q)`, `D_zQ* = ∂_z(Q*) + [A_z, Q*]` with `∂_z(Q*) = star(∂_z̄Q)`,
/// and `D_z̄Q = ∂_z̄Q + [A_z̄, Q]` where `A_z̄` is the stored `A_z̃`.
pub fn check_affine_sphere_gauge(gd: &GaugeData, tol: f64) -> Result<AffineSphereGaugeReport, GaugeError> {
    if gd.mode != RealityMode::EuclideanSU21 {
        return Err(GaugeError::WrongMode { expected: RealityMode::EuclideanSU21, got: gd.mode });
    }
    let d = gd.derivs()?;
    let q = gd.q;
    let qs = star(&q);
    let dzqs = star(&d.dq_dzt) + gd.a_z.commutator(&qs);
    let dzbq = d.dq_dzt + gd.a_zt.commutator(&q);

    let qqs = q * qs;
    let qsq = qs * q;
    let tr_q_qstar = qqs.trace();
    let dq2 = dzqs * dzqs;
    let tr_dqstar_sq = dq2.trace();
    let tr4 = (dq2 * dzbq * dzbq).trace();

    let t1 = qqs.powi(4);
    let t2 = qsq * qsq * dzqs * dzbq;
    let t3 = qsq * dzqs * qqs * dzbq;
    let c3_trace = (t1 - t2 + t3).trace();

    let s_q = norms(&[&q, &qs]);
    let s_d2 = norms(&[&dzqs, &dzqs]);
    let s_d4 = norms(&[&dzqs, &dzqs, &dzbq, &dzbq]);
    let s_c3 = norms(&[&q, &qs, &q, &qs, &q, &qs, &q, &qs]).max(norms(&[&qs, &q, &qs, &q, &dzqs, &dzbq]));

    let degenerate = is_zero(tr4, s_d4, tol);
    Ok(AffineSphereGaugeReport {
        mode: gd.mode,
        tol,
        c1: min_poly_is_t2(&q, tol) && is_nonzero(tr_q_qstar, s_q, tol),
        c2: is_zero(tr_dqstar_sq, s_d2, tol) && !degenerate,
        c3: is_zero(c3_trace, s_c3, tol),
        tr_q_qstar,
        tr_dqstar_sq,
        tr_dqstar_sq_dq_sq: tr4,
        c3_trace,
        degenerate,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TzitzeicaGaugeReport {
    pub mode: RealityMode,
    pub tol: f64,
    /// `P² = Q² = 0`, both nonzero, `Tr(PQ) ≠ 0`.
    pub i: bool,
    /// `Tr((D_zP)²) = 0 = Tr((D_z̃Q)²)`, `Tr((D_zP)²(D_z̃Q)²) ≠ 0`.
    pub ii: bool,
    /// Trace identity of degree eight.
    pub iii: bool,
    pub tr_pq: Complex64,
    pub tr_dp_sq: Complex64,
    pub tr_dq_sq: Complex64,
    pub tr_dp_sq_dq_sq: Complex64,
    pub iii_trace: Complex64,
}

impl TzitzeicaGaugeReport {
    pub fn all(&self) -> bool {
        self.i && self.ii && self.iii
    }
}

/// Conditions for a holomorphic (or real `sl(3,ℝ)`) Hitchin configuration to
/// be gauge and coordinate equivalent to the normalised Tzitzéica gauge.
pub fn check_tzitzeica_gauge(gd: &GaugeData, tol: f64) -> Result<TzitzeicaGaugeReport, GaugeError> {
    if gd.mode == RealityMode::EuclideanSU21 {
        return Err(GaugeError::WrongMode { expected: RealityMode::Holomorphic, got: gd.mode });
    }
    let (p, q) = (gd.p, gd.q);
    let dp = gd.dz_p()?;
    let dq = gd.dzt_q()?;
    let pq = p * q;
    let tr_pq = pq.trace();
    let dp2 = dp * dp;
    let dq2 = dq * dq;
    let tr_dp_sq = dp2.trace();
    let tr_dq_sq = dq2.trace();
    let tr4 = (dp2 * dq2).trace();
    let m = pq.powi(4) + pq * pq * dp * dq - pq * dp * q * p * dq;
    let iii_trace = m.trace();

    let s_pq = norms(&[&p, &q]);
    let s_c3 = norms(&[&p, &q, &p, &q, &p, &q, &p, &q]).max(norms(&[&p, &q, &p, &q, &dp, &dq]));
    Ok(TzitzeicaGaugeReport {
        mode: gd.mode,
        tol,
        i: min_poly_is_t2(&p, tol) && min_poly_is_t2(&q, tol) && is_nonzero(tr_pq, s_pq, tol),
        ii: is_zero(tr_dp_sq, norms(&[&dp, &dp]), tol)
            && is_zero(tr_dq_sq, norms(&[&dq, &dq]), tol)
            && is_nonzero(tr4, norms(&[&dp, &dp, &dq, &dq]), tol),
        iii: is_zero(iii_trace, s_c3, tol),
        tr_pq,
        tr_dp_sq,
        tr_dq_sq,
        tr_dp_sq_dq_sq: tr4,
        iii_trace,
    })
}

/// Which equation the real `sl(3,ℝ)` fields reduce to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RealForm {
    /// `u_xy = e^u − e^{−2u}`
    TzitzeicaMinus,
    /// `u_xy = e^u + e^{−2u}`
    TzitzeicaPlus,
    /// `u_xy = e^u`
    Liouville,
}

/// `Tr((D_xP)²(D_yQ)²)` together with its natural scale.
pub fn real_form_trace(gd: &GaugeData) -> Result<(f64, f64), GaugeError> {
    let dp = gd.dz_p()?;
    let dq = gd.dzt_q()?;
    let t = (dp * dp * dq * dq).trace();
    Ok((t.re, norms(&[&dp, &dp, &dq, &dq])))
}

/// Sign classifier on the ultrahyperbolic slice.
pub fn classify_real_form(gd: &GaugeData, tol: f64) -> Result<RealForm, GaugeError> {
    if gd.mode != RealityMode::UltrahyperbolicSL3R {
        return Err(GaugeError::WrongMode { expected: RealityMode::UltrahyperbolicSL3R, got: gd.mode });
    }
    let all_real = [gd.a_z, gd.a_zt, gd.p, gd.q]
        .iter()
        .all(|m| m.0.iter().flatten().all(|v| v.im.abs() <= tol * (1.0 + v.re.abs())));
    if !all_real {
        return Err(GaugeError::RealityViolation("sl(3,R) fields must be real".into()));
    }
    let (t, scale) = real_form_trace(gd)?;
    Ok(if t.abs() <= tol * scale || t == 0.0 {
        RealForm::Liouville
    } else if t > 0.0 {
        RealForm::TzitzeicaMinus
    } else {
        RealForm::TzitzeicaPlus
    })
}

#[cfg(test)]
mod tests {
    use super::super::{AffineSphereJet, GaugeDerivatives, TzitzeicaJet};
    use super::*;
    use crate::re;

    #[test]
    fn affine_sphere_gauge_traces_at_origin() {
        let j = AffineSphereJet::euclidean_on_shell(0.0, re(0.0), re(1.0));
        let r = check_affine_sphere_gauge(&j.gauge_data().unwrap(), DEFAULT_CONDITION_TOL).unwrap();
        assert!(r.c1);
        assert!((r.tr_q_qstar - re(0.5)).norm() < 1e-15);
    }

    #[test]
    fn zero_q_fails_c1() {
        let mut g = AffineSphereJet::euclidean_on_shell(0.0, re(0.0), re(1.0)).gauge_data().unwrap();
        g.q = CMat3::zeros();
        g.p = CMat3::zeros();
        assert!(!check_affine_sphere_gauge(&g, DEFAULT_CONDITION_TOL).unwrap().c1);
    }

    #[test]
    fn liouville_point_is_degenerate() {
        let j = AffineSphereJet::euclidean_on_shell(0.0, re(0.0), re(0.0));
        let r = check_affine_sphere_gauge(&j.gauge_data().unwrap(), DEFAULT_CONDITION_TOL).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.tr_dqstar_sq_dq_sq, re(0.0));
        assert!(!r.c2);
    }

    #[test]
    fn tzitzeica_gauge_on_normal_form() {
        let j = TzitzeicaJet::on_shell(Complex64::new(0.2, -0.4), re(1.3), Complex64::new(0.0, 0.5), re(1.0), re(1.0));
        let r = check_tzitzeica_gauge(&j.gauge_data(), DEFAULT_CONDITION_TOL).unwrap();
        assert!(r.all(), "{r:?}");
    }

    #[test]
    fn tzitzeica_gauge_singular_pair() {
        let g = GaugeData::new(
            RealityMode::Holomorphic,
            CMat3::zeros(),
            CMat3::zeros(),
            CMat3::unit(1, 3),
            CMat3::unit(1, 2),
        )
        .with_derivs(GaugeDerivatives::default());
        assert!(!check_tzitzeica_gauge(&g, DEFAULT_CONDITION_TOL).unwrap().i);
    }

    #[test]
    fn real_form_signs() {
        let j = TzitzeicaJet::real(0.4, 0.1, -0.3, 0.0);
        assert_eq!(classify_real_form(&j.gauge_data(), 1e-9).unwrap(), RealForm::TzitzeicaMinus);
        let (t, _) = real_form_trace(&j.gauge_data()).unwrap();
        assert!((t - 0.4f64.exp()).abs() < 1e-12);
        let flipped = TzitzeicaJet { b: re(-1.0), ..j };
        assert_eq!(classify_real_form(&flipped.gauge_data(), 1e-9).unwrap(), RealForm::TzitzeicaPlus);
        let mut flat = j.gauge_data();
        flat.a_z = CMat3::zeros();
        flat.a_zt = CMat3::zeros();
        flat.derivs = Some(GaugeDerivatives::default());
        assert_eq!(classify_real_form(&flat, 1e-9).unwrap(), RealForm::Liouville);
    }
}
