//! Field containers for the holomorphic Hitchin system, explicit ansätze,
//! residuals, the gauge-invariant characterisation conditions, the real-form
//! sign classifier and the ℤ₃ Toda reduction.

mod ansatz;
mod conditions;
mod residual;
mod toda;

pub use ansatz::{
    build_affine_sphere_ansatz, build_first_ansatz, build_tzitzeica_ansatz, build_wang_ansatz, AffineSphereJet,
    FirstAnsatzJet, TzitzeicaJet, WangJet,
};
pub use conditions::{
    check_affine_sphere_gauge, check_tzitzeica_gauge, classify_real_form, real_form_trace, AffineSphereGaugeReport,
    RealForm, TzitzeicaGaugeReport, DEFAULT_CONDITION_TOL,
};
pub use residual::{hitchin_residual, lax_commutator_at, lax_commutator_coeffs, HitchinResidual};
pub use toda::{build_toda_ansatz, toda_gauge_on_grid, toda_residual, TodaJet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matalg3::CMat3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaugeError {
    #[error("derivative slots are empty")]
    MissingDerivatives,
    #[error("reality condition violated: {0}")]
    RealityViolation(String),
    #[error("degenerate ansatz: {0}")]
    DegenerateAnsatz(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("operation requires {expected:?} mode, got {got:?}")]
    WrongMode { expected: RealityMode, got: RealityMode },
    #[error("gauge matrix is not invertible")]
    SingularGauge,
}

/// Which real slice (if any) the fields live on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum RealityMode {
    /// Complexified fields; `z` and `z̃` independent.
    #[default]
    Holomorphic,
    /// `z̃ = z̄`, fields in `su(2,1)`: `A_z̄ = A_z*`, `P = −Q*`.
    EuclideanSU21,
    /// `z = x`, `z̃ = y` real, all entries real.
    UltrahyperbolicSL3R,
}

/// First partial derivatives needed by the residuals and conditions.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GaugeDerivatives {
    pub da_z_dzt: CMat3,
    pub da_zt_dz: CMat3,
    pub dp_dzt: CMat3,
    pub dq_dz: CMat3,
    pub dp_dz: CMat3,
    pub dq_dzt: CMat3,
}

impl GaugeDerivatives {
    fn map(&self, f: impl Fn(&CMat3) -> CMat3) -> Self {
        GaugeDerivatives {
            da_z_dzt: f(&self.da_z_dzt),
            da_zt_dz: f(&self.da_zt_dz),
            dp_dzt: f(&self.dp_dzt),
            dq_dz: f(&self.dq_dz),
            dp_dz: f(&self.dp_dz),
            dq_dzt: f(&self.dq_dzt),
        }
    }
}

/// `(A_z, A_z̃, P, Q)` at a point, optionally with first derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeData {
    pub mode: RealityMode,
    pub a_z: CMat3,
    pub a_zt: CMat3,
    pub p: CMat3,
    pub q: CMat3,
    pub derivs: Option<GaugeDerivatives>,
}

impl GaugeData {
    pub fn new(mode: RealityMode, a_z: CMat3, a_zt: CMat3, p: CMat3, q: CMat3) -> Self {
        GaugeData { mode, a_z, a_zt, p, q, derivs: None }
    }

    pub fn with_derivs(mut self, d: GaugeDerivatives) -> Self {
        self.derivs = Some(d);
        self
    }

    pub fn derivs(&self) -> Result<&GaugeDerivatives, GaugeError> {
        self.derivs.as_ref().ok_or(GaugeError::MissingDerivatives)
    }

    /// Gauge transformation by a constant `g`: every field and derivative
    /// slot becomes `g⁻¹ X g` (the inhomogeneous term vanishes).
    pub fn conjugate(&self, g: &CMat3) -> Result<Self, GaugeError> {
        let gi = g.inverse().ok_or(GaugeError::SingularGauge)?;
        let c = |m: &CMat3| m.conjugate_by(g, &gi);
        Ok(GaugeData {
            mode: self.mode,
            a_z: c(&self.a_z),
            a_zt: c(&self.a_zt),
            p: c(&self.p),
            q: c(&self.q),
            derivs: self.derivs.map(|d| d.map(c)),
        })
    }

    /// Affine change of coordinates `ẑ = a z`, `ẑ̃ = b z̃` with constant
    /// `a, b`: one-form components pick up `1/a` or `1/b`, and each further
    /// derivative another such factor.
    pub fn rescale_coordinates(&self, a: num_complex::Complex64, b: num_complex::Complex64) -> Self {
        let (ia, ib) = (a.inv(), b.inv());
        let d = self.derivs.map(|d| GaugeDerivatives {
            da_z_dzt: d.da_z_dzt * (ia * ib),
            da_zt_dz: d.da_zt_dz * (ia * ib),
            dp_dzt: d.dp_dzt * (ia * ib),
            dq_dz: d.dq_dz * (ia * ib),
            dp_dz: d.dp_dz * (ia * ia),
            dq_dzt: d.dq_dzt * (ib * ib),
        });
        GaugeData {
            mode: self.mode,
            a_z: self.a_z * ia,
            a_zt: self.a_zt * ib,
            p: self.p * ia,
            q: self.q * ib,
            derivs: d,
        }
    }

    /// `D_z P = ∂_z P + [A_z, P]`.
    pub fn dz_p(&self) -> Result<CMat3, GaugeError> {
        Ok(self.derivs()?.dp_dz + self.a_z.commutator(&self.p))
    }

    /// `D_z̃ Q = ∂_z̃ Q + [A_z̃, Q]`.
    pub fn dzt_q(&self) -> Result<CMat3, GaugeError> {
        Ok(self.derivs()?.dq_dzt + self.a_zt.commutator(&self.q))
    }

    /// Largest entry over fields and derivative slots; used to scale
    /// tolerances.
    pub fn scale(&self) -> f64 {
        let mut s = [self.a_z, self.a_zt, self.p, self.q].iter().map(CMat3::norm_max).fold(0.0, f64::max);
        if let Some(d) = &self.derivs {
            for m in [d.da_z_dzt, d.da_zt_dz, d.dp_dzt, d.dq_dz, d.dp_dz, d.dq_dzt] {
                s = s.max(m.norm_max());
            }
        }
        s
    }
}
