use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{GaugeData, GaugeError};
use crate::matalg3::CMat3;

/// The three holomorphic Hitchin equations evaluated on a field
/// configuration; all vanish on solutions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HitchinResidual {
    /// `D_z Q = ∂_z Q + [A_z, Q]`
    pub r1: CMat3,
    /// `D_z̃ P = ∂_z̃ P + [A_z̃, P]`
    pub r2: CMat3,
    /// `∂_z A_z̃ − ∂_z̃ A_z + [A_z, A_z̃] + [P, Q]`
    pub r3: CMat3,
}

impl HitchinResidual {
    pub fn max_norm(&self) -> f64 {
        self.r1.norm_max().max(self.r2.norm_max()).max(self.r3.norm_max())
    }
}

pub fn hitchin_residual(gd: &GaugeData) -> Result<HitchinResidual, GaugeError> {
    let d = gd.derivs()?;
    Ok(HitchinResidual {
        r1: d.dq_dz + gd.a_z.commutator(&gd.q),
        r2: d.dp_dzt + gd.a_zt.commutator(&gd.p),
        r3: d.da_zt_dz - d.da_z_dzt + gd.a_z.commutator(&gd.a_zt) + gd.p.commutator(&gd.q),
    })
}

/// `c_z ∂_z + c_zt ∂_z̃ + M` with the first derivatives of `M` attached.
#[derive(Clone, Copy)]
struct FirstOrderOp {
    c_z: f64,
    c_zt: f64,
    m: CMat3,
    m_z: CMat3,
    m_zt: CMat3,
}

impl FirstOrderOp {
    /// `[X, Y]` for constant-coefficient derivative parts: the derivative
    /// terms act on the other operator's potential, the potentials commute
    /// as matrices.
    fn bracket(&self, other: &Self) -> CMat3 {
        other.m_z * self.c_z + other.m_zt * self.c_zt - self.m_z * other.c_z - self.m_zt * other.c_zt
            + self.m.commutator(&other.m)
    }
}

/// Coefficients of `[D_z + λP, Q + λD_z̃] = C0 + λ C1 + λ² C2`, obtained by
/// expanding the operator bracket term by term.
pub fn lax_commutator_coeffs(gd: &GaugeData) -> Result<(CMat3, CMat3, CMat3), GaugeError> {
    let d = gd.derivs()?;
    let z = CMat3::zeros();
    // D_z + λP = X0 + λ X1 ;  Q + λ D_z̃ = Y0 + λ Y1
    let x0 = FirstOrderOp { c_z: 1.0, c_zt: 0.0, m: gd.a_z, m_z: z, m_zt: d.da_z_dzt };
    let x1 = FirstOrderOp { c_z: 0.0, c_zt: 0.0, m: gd.p, m_z: d.dp_dz, m_zt: d.dp_dzt };
    let y0 = FirstOrderOp { c_z: 0.0, c_zt: 0.0, m: gd.q, m_z: d.dq_dz, m_zt: d.dq_dzt };
    let y1 = FirstOrderOp { c_z: 0.0, c_zt: 1.0, m: gd.a_zt, m_z: d.da_zt_dz, m_zt: z };
    Ok((x0.bracket(&y0), x0.bracket(&y1) + x1.bracket(&y0), x1.bracket(&y1)))
}

/// The zeroth-order part of `[D_z + λP, Q + λD_z̃]` at a single `λ`,
/// assembled directly from the fields.
pub fn lax_commutator_at(gd: &GaugeData, lambda: Complex64) -> Result<CMat3, GaugeError> {
    let d = gd.derivs()?;
    let l1 = gd.a_z + gd.p * lambda;
    let l2 = gd.q + gd.a_zt * lambda;
    // ∂_z acting on L2, λ∂_z̃ acting on L1
    let dl2 = d.dq_dz + d.da_zt_dz * lambda;
    let dl1 = (d.da_z_dzt + d.dp_dzt * lambda) * lambda;
    Ok(dl2 - dl1 + l1.commutator(&l2))
}

#[cfg(test)]
mod tests {
    use super::super::{build_tzitzeica_ansatz, GaugeDerivatives, RealityMode, TzitzeicaJet, WangJet};
    use super::*;
    use crate::re;

    #[test]
    fn tzitzeica_vacuum_is_a_solution() {
        let g = build_tzitzeica_ansatz(re(0.0), re(0.0)).with_derivs(GaugeDerivatives::default());
        let r = hitchin_residual(&g).unwrap();
        assert_eq!(r.max_norm(), 0.0);
        assert_eq!(g.a_z.commutator(&g.a_zt), CMat3::real_diag([-1.0, 0.0, 1.0]));
        assert_eq!(g.p.commutator(&g.q), CMat3::real_diag([1.0, 0.0, -1.0]));
        let (c0, c1, c2) = lax_commutator_coeffs(&g).unwrap();
        assert_eq!(c0.norm_max() + c1.norm_max() + c2.norm_max(), 0.0);
    }

    #[test]
    fn missing_slots() {
        let g = build_tzitzeica_ansatz(re(0.0), re(0.0));
        assert_eq!(hitchin_residual(&g), Err(GaugeError::MissingDerivatives));
    }

    #[test]
    fn constant_fields_without_higgs() {
        let a = CMat3::from_real([[1.0, 2.0, 0.0], [0.0, -1.0, 3.0], [1.0, 0.0, 0.0]]);
        let b = CMat3::from_real([[0.0, 1.0, 1.0], [2.0, 0.0, 0.0], [0.0, -1.0, 0.0]]);
        let g = GaugeData::new(RealityMode::Holomorphic, a, b, CMat3::zeros(), CMat3::zeros())
            .with_derivs(GaugeDerivatives::default());
        assert_eq!(hitchin_residual(&g).unwrap().r3, a.commutator(&b));
    }

    #[test]
    fn wang_vacuum() {
        let g = WangJet { u: re(0.0), u_z: re(0.0), u_zt: re(0.0), u_zzt: re(0.0) }.gauge_data();
        assert!(hitchin_residual(&g).unwrap().max_norm() < 1e-15);
    }

    #[test]
    fn on_shell_tzitzeica_jet() {
        let j = TzitzeicaJet::on_shell(Complex64::new(0.3, 0.1), re(0.7), re(-0.2), re(1.0), re(1.0));
        assert!(hitchin_residual(&j.gauge_data()).unwrap().max_norm() < 1e-14);
    }
}
