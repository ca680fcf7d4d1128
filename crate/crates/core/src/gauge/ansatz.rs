//! Explicit field configurations. Each `*Jet` carries enough derivatives of
//! the scalar unknown to fill every derivative slot analytically; the bare
//! `build_*` functions return the fields alone.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{GaugeData, GaugeDerivatives, GaugeError, RealityMode};
use crate::matalg3::CMat3;
use crate::re;

fn e(i: usize, j: usize, c: Complex64) -> CMat3 {
    CMat3::scaled_unit(i, j, c)
}

/// `u`, its first derivatives and `u_zz̃` at a point, plus the functions
/// `r(z)`, `b(z̃)` of the general gauge (both 1 in the normalised ansatz).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TzitzeicaJet {
    pub u: Complex64,
    pub u_z: Complex64,
    pub u_zt: Complex64,
    pub u_zzt: Complex64,
    pub r: Complex64,
    pub b: Complex64,
    pub mode: RealityMode,
}

impl TzitzeicaJet {
    pub fn new(u: Complex64, u_z: Complex64, u_zt: Complex64, u_zzt: Complex64) -> Self {
        TzitzeicaJet { u, u_z, u_zt, u_zzt, r: re(1.0), b: re(1.0), mode: RealityMode::Holomorphic }
    }

    /// Real jet on the ultrahyperbolic slice.
    pub fn real(u: f64, u_x: f64, u_y: f64, u_xy: f64) -> Self {
        TzitzeicaJet { mode: RealityMode::UltrahyperbolicSL3R, ..Self::new(re(u), re(u_x), re(u_y), re(u_xy)) }
    }

    /// Jet of an exact solution of `u_zz̃ = e^u − r b e^{−2u}` given `u` and
    /// its first derivatives.
    pub fn on_shell(u: Complex64, u_z: Complex64, u_zt: Complex64, r: Complex64, b: Complex64) -> Self {
        let u_zzt = u.exp() - r * b * (-2.0 * u).exp();
        TzitzeicaJet { r, b, ..Self::new(u, u_z, u_zt, u_zzt) }
    }

    /// `P = E13`, `Q = e^u E31`, `A_z = u_z E11 + r E21 − u_z E22 + E32`,
    /// `A_z̃ = b e^{−2u} E12 + e^u E23`.
    pub fn gauge_data(&self) -> GaugeData {
        let (eu, e2u) = (self.u.exp(), (-2.0 * self.u).exp());
        let p = CMat3::unit(1, 3);
        let q = e(3, 1, eu);
        let a_z = e(1, 1, self.u_z) + e(2, 1, self.r) - e(2, 2, self.u_z) + CMat3::unit(3, 2);
        let a_zt = e(1, 2, self.b * e2u) + e(2, 3, eu);
        let d = GaugeDerivatives {
            da_z_dzt: e(1, 1, self.u_zzt) - e(2, 2, self.u_zzt),
            da_zt_dz: e(1, 2, -2.0 * self.u_z * self.b * e2u) + e(2, 3, self.u_z * eu),
            dp_dzt: CMat3::zeros(),
            dq_dz: e(3, 1, self.u_z * eu),
            dp_dz: CMat3::zeros(),
            dq_dzt: e(3, 1, self.u_zt * eu),
        };
        GaugeData::new(self.mode, a_z, a_zt, p, q).with_derivs(d)
    }
}

/// Fields of the normalised Tzitzéica gauge (no derivative slots).
pub fn build_tzitzeica_ansatz(u: Complex64, u_z: Complex64) -> GaugeData {
    let mut g = TzitzeicaJet::new(u, u_z, re(0.0), re(0.0)).gauge_data();
    g.derivs = None;
    g
}

/// Second-order jet of `(ψ, U, Ũ)` for the affine sphere gauge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineSphereJet {
    pub psi: Complex64,
    pub psi_z: Complex64,
    pub psi_zt: Complex64,
    pub psi_zzt: Complex64,
    pub u: Complex64,
    pub ut: Complex64,
    pub mode: RealityMode,
}

impl AffineSphereJet {
    /// Euclidean jet with real `ψ`, `ψ_z̄ = conj(ψ_z)` and `Ũ = Ū`.
    pub fn euclidean(psi: f64, psi_z: Complex64, psi_zzbar: f64, u: Complex64) -> Self {
        AffineSphereJet {
            psi: re(psi),
            psi_z,
            psi_zt: psi_z.conj(),
            psi_zzt: re(psi_zzbar),
            u,
            ut: u.conj(),
            mode: RealityMode::EuclideanSU21,
        }
    }

    /// Euclidean jet whose `ψ_zz̄` is fixed by the affine sphere equation.
    pub fn euclidean_on_shell(psi: f64, psi_z: Complex64, u: Complex64) -> Self {
        let psi_zzbar = -0.5 * psi.exp() - u.norm_sqr() * (-2.0 * psi).exp();
        Self::euclidean(psi, psi_z, psi_zzbar, u)
    }

    fn check(&self) -> Result<(), GaugeError> {
        if self.mode == RealityMode::EuclideanSU21 {
            let tol = 1e-12 * (1.0 + self.u.norm());
            if (self.ut - self.u.conj()).norm() > tol {
                return Err(GaugeError::RealityViolation(format!(
                    "Ũ = {} is not conj(U) = {}",
                    self.ut,
                    self.u.conj()
                )));
            }
            if self.psi.im.abs() > 1e-12 * (1.0 + self.psi.norm())
                || (self.psi_zt - self.psi_z.conj()).norm() > 1e-12 * (1.0 + self.psi_z.norm())
            {
                return Err(GaugeError::RealityViolation("ψ is not real".into()));
            }
        }
        Ok(())
    }

    /// With `a = e^{ψ/2}/√2`: `Q = a E13`, `P = −a E31`,
    /// `A_z = a E12 − ½ψ_z E22 − U e^{−ψ} E23 + ½ψ_z E33`,
    /// `A_z̃ = −a E21 + ½ψ_z̃ E22 − Ũ e^{−ψ} E32 − ½ψ_z̃ E33`.
    pub fn gauge_data(&self) -> Result<GaugeData, GaugeError> {
        self.check()?;
        let a = (self.psi * 0.5).exp() * std::f64::consts::FRAC_1_SQRT_2;
        let em = (-self.psi).exp();
        let (pz, pzt, pzzt) = (self.psi_z, self.psi_zt, self.psi_zzt);
        let half = 0.5;
        let q = e(1, 3, a);
        let p = e(3, 1, -a);
        let a_z = e(1, 2, a) - e(2, 2, pz * half) - e(2, 3, self.u * em) + e(3, 3, pz * half);
        let a_zt = e(2, 1, -a) + e(2, 2, pzt * half) - e(3, 2, self.ut * em) - e(3, 3, pzt * half);
        // U holomorphic, Ũ antiholomorphic.
        let d = GaugeDerivatives {
            da_z_dzt: e(1, 2, a * pzt * half) - e(2, 2, pzzt * half)
                + e(2, 3, self.u * em * pzt)
                + e(3, 3, pzzt * half),
            da_zt_dz: e(2, 1, -a * pz * half) + e(2, 2, pzzt * half) + e(3, 2, self.ut * em * pz)
                - e(3, 3, pzzt * half),
            dp_dzt: e(3, 1, -a * pzt * half),
            dq_dz: e(1, 3, a * pz * half),
            dp_dz: e(3, 1, -a * pz * half),
            dq_dzt: e(1, 3, a * pzt * half),
        };
        Ok(GaugeData::new(self.mode, a_z, a_zt, p, q).with_derivs(d))
    }
}

/// Fields of the affine sphere gauge (no derivative slots). In Euclidean
/// mode `Ũ` must equal `conj(U)`.
pub fn build_affine_sphere_ansatz(
    psi: f64,
    psi_z: Complex64,
    psi_zbar: Complex64,
    u: Complex64,
    ut: Complex64,
    mode: RealityMode,
) -> Result<GaugeData, GaugeError> {
    let jet = AffineSphereJet { psi: re(psi), psi_z, psi_zt: psi_zbar, psi_zzt: re(0.0), u, ut, mode };
    let mut g = jet.gauge_data()?;
    g.derivs = None;
    Ok(g)
}

/// Jet for the gauge with `A_z̃ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WangJet {
    pub u: Complex64,
    pub u_z: Complex64,
    pub u_zt: Complex64,
    pub u_zzt: Complex64,
}

impl WangJet {
    /// `P = E13 + E21 + E32`, `Q = e^{−2u} E12 + e^u E23 + e^u E31`,
    /// `A_z = diag(u_z, −u_z, 0)`, `A_z̃ = 0`.
    pub fn gauge_data(&self) -> GaugeData {
        let (eu, e2u) = (self.u.exp(), (-2.0 * self.u).exp());
        let p = CMat3::unit(1, 3) + CMat3::unit(2, 1) + CMat3::unit(3, 2);
        let q = e(1, 2, e2u) + e(2, 3, eu) + e(3, 1, eu);
        let a_z = CMat3::diag([self.u_z, -self.u_z, re(0.0)]);
        let dq = |du: Complex64| e(1, 2, -2.0 * du * e2u) + e(2, 3, du * eu) + e(3, 1, du * eu);
        let d = GaugeDerivatives {
            da_z_dzt: CMat3::diag([self.u_zzt, -self.u_zzt, re(0.0)]),
            da_zt_dz: CMat3::zeros(),
            dp_dzt: CMat3::zeros(),
            dq_dz: dq(self.u_z),
            dp_dz: CMat3::zeros(),
            dq_dzt: dq(self.u_zt),
        };
        GaugeData::new(RealityMode::Holomorphic, a_z, CMat3::zeros(), p, q).with_derivs(d)
    }
}

pub fn build_wang_ansatz(u: Complex64, u_z: Complex64) -> GaugeData {
    let mut g = WangJet { u, u_z, u_zt: re(0.0), u_zzt: re(0.0) }.gauge_data();
    g.derivs = None;
    g
}

/// Jet for the diagonal-connection Euclidean gauge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstAnsatzJet {
    pub psi: f64,
    pub psi_z: Complex64,
    pub psi_zzbar: f64,
    pub u: Complex64,
    /// `U'(z)`; enters through `∂_z̄ Ū`.
    pub u_z: Complex64,
}

impl FirstAnsatzJet {
    /// `A_w = Q`, `A_w̄ = −P` with
    /// `A_w = a E13 + Ū e^{−ψ} E21 + a E32`,
    /// `A_w̄ = −U e^{−ψ} E12 + a E23 + a E31`,
    /// `A_z = diag(−½ψ_z, ½ψ_z, 0)`, `A_z̄ = diag(½ψ_z̄, −½ψ_z̄, 0)`.
    pub fn gauge_data(&self) -> GaugeData {
        let a = re((self.psi * 0.5).exp() * std::f64::consts::FRAC_1_SQRT_2);
        let em = (-self.psi).exp();
        let (pz, pzb) = (self.psi_z, self.psi_z.conj());
        let (u, ub) = (self.u, self.u.conj());
        let a_w = e(1, 3, a) + e(2, 1, ub * em) + e(3, 2, a);
        let a_wbar = e(1, 2, -u * em) + e(2, 3, a) + e(3, 1, a);
        let half = re(0.5);
        let a_z = CMat3::diag([-half * pz, half * pz, re(0.0)]);
        let a_zb = CMat3::diag([half * pzb, -half * pzb, re(0.0)]);
        let pzz = re(self.psi_zzbar);
        // ∂ of a is a ψ/2; ∂ of e^{−ψ} is −e^{−ψ}ψ; U holomorphic.
        let dw = |d: Complex64, du: Complex64| e(1, 3, a * d * half) + e(2, 1, du) + e(3, 2, a * d * half);
        let dwb = |d: Complex64, du: Complex64| e(1, 2, du) + e(2, 3, a * d * half) + e(3, 1, a * d * half);
        let dq_dz = dw(pz, -ub * em * pz);
        let dq_dzt = dw(pzb, (self.u_z.conj() - ub * pzb) * em);
        let dp_dz = -dwb(pz, (u * pz - self.u_z) * em);
        let dp_dzt = -dwb(pzb, u * em * pzb);
        let d = GaugeDerivatives {
            da_z_dzt: CMat3::diag([-half * pzz, half * pzz, re(0.0)]),
            da_zt_dz: CMat3::diag([half * pzz, -half * pzz, re(0.0)]),
            dp_dzt,
            dq_dz,
            dp_dz,
            dq_dzt,
        };
        GaugeData::new(RealityMode::EuclideanSU21, a_z, a_zb, -a_wbar, a_w).with_derivs(d)
    }
}

pub fn build_first_ansatz(psi: f64, psi_z: Complex64, u: Complex64) -> GaugeData {
    let mut g = FirstAnsatzJet { psi, psi_z, psi_zzbar: 0.0, u, u_z: re(0.0) }.gauge_data();
    g.derivs = None;
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matalg3::{in_su21, star};

    #[test]
    fn tzitzeica_at_zero() {
        let g = build_tzitzeica_ansatz(re(0.0), re(0.0));
        assert_eq!(g.p, CMat3::unit(1, 3));
        assert_eq!(g.q, CMat3::unit(3, 1));
        assert_eq!(g.a_z, CMat3::unit(2, 1) + CMat3::unit(3, 2));
        assert_eq!(g.a_zt, CMat3::unit(1, 2) + CMat3::unit(2, 3));
    }

    #[test]
    fn tzitzeica_q31_is_exp_u() {
        let g = build_tzitzeica_ansatz(re(2f64.ln()), re(0.3));
        assert!((g.q[(2, 0)] - re(2.0)).norm() < 1e-15);
        for m in [g.a_z, g.a_zt, g.p, g.q] {
            assert!(m.trace().norm() < 1e-15);
        }
    }

    #[test]
    fn affine_sphere_at_origin() {
        let g =
            build_affine_sphere_ansatz(0.0, re(0.0), re(0.0), re(1.0), re(1.0), RealityMode::EuclideanSU21).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(g.q.dist(&(CMat3::unit(1, 3) * s)) < 1e-15);
        assert!(g.a_z.dist(&(CMat3::unit(1, 2) * s - CMat3::unit(2, 3))) < 1e-15);
    }

    #[test]
    fn affine_sphere_reality() {
        let pz = Complex64::new(0.3, -0.7);
        let u = Complex64::new(-0.4, 1.1);
        let g = build_affine_sphere_ansatz(0.37, pz, pz.conj(), u, u.conj(), RealityMode::EuclideanSU21).unwrap();
        assert!(star(&g.q).dist(&(-g.p)) < 1e-15);
        assert!(star(&g.a_z).dist(&g.a_zt) < 1e-15);
        let bad = build_affine_sphere_ansatz(0.0, pz, pz.conj(), u, u, RealityMode::EuclideanSU21);
        assert!(matches!(bad, Err(GaugeError::RealityViolation(_))));
    }

    #[test]
    fn wang_shape() {
        let g = build_wang_ansatz(re(0.0), re(0.0));
        assert_eq!(g.p, CMat3::unit(1, 3) + CMat3::unit(2, 1) + CMat3::unit(3, 2));
        assert_eq!(g.q, CMat3::unit(1, 2) + CMat3::unit(2, 3) + CMat3::unit(3, 1));
        assert_eq!(build_wang_ansatz(re(0.8), re(-2.0)).a_zt, CMat3::zeros());
    }

    #[test]
    fn first_ansatz_shape() {
        let g = build_first_ansatz(0.0, re(0.0), re(0.0));
        assert_eq!(g.a_z, CMat3::zeros());
        assert_eq!(g.a_zt, CMat3::zeros());
        let g = build_first_ansatz(0.9, Complex64::new(0.2, 0.5), Complex64::new(1.0, -1.0));
        assert!((g.q[(0, 2)] - re((0.45f64).exp() / 2f64.sqrt())).norm() < 1e-15);
        // A_p = A_z + A_z̄ and A_q = i(A_z − A_z̄) are in su(2,1).
        let i = crate::I;
        assert!(in_su21(&(g.a_z + g.a_zt), 1e-14));
        assert!(in_su21(&((g.a_z - g.a_zt) * i), 1e-14));
    }
}
