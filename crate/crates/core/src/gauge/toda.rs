//! The ℤ₃ Toda reduction: dropping the degree-eight trace condition leaves
//! the gauge
//! `A_x = [[n,0,0],[r,u_x−2n,0],[0,1,n−u_x]]`, `A_y = s E12 + k E23`,
//! `P = E13`, `Q = e^u E31` with `n = α_x`, `s = b e^{u−3α}`,
//! `k = (c/b) e^{−2u+3α}`. With `u₁ = α`, `u₂ = u − 2α` and `y → −y` the
//! Hitchin equations become the Toda pair with `ε₁ = rb`, `ε₂ = c/b`.

use serde::{Deserialize, Serialize};

use super::{GaugeData, GaugeDerivatives, GaugeError, RealityMode};
use crate::matalg3::CMat3;
use crate::pdesolve::ScalarGrid;
use crate::re;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TodaJet {
    pub alpha: f64,
    pub alpha_x: f64,
    pub alpha_xy: f64,
    pub u: f64,
    pub u_x: f64,
    pub u_y: f64,
    pub u_xy: f64,
    pub r: f64,
    pub b: f64,
    pub c: f64,
}

impl TodaJet {
    pub fn s(&self) -> f64 {
        self.b * (self.u - 3.0 * self.alpha).exp()
    }

    pub fn k(&self) -> f64 {
        self.c / self.b * (-2.0 * self.u + 3.0 * self.alpha).exp()
    }

    pub fn gauge_data(&self) -> Result<GaugeData, GaugeError> {
        if self.b == 0.0 {
            return Err(GaugeError::DegenerateAnsatz("b = 0".into()));
        }
        if self.r == 0.0 {
            return Err(GaugeError::DegenerateAnsatz("r = 0".into()));
        }
        let n = self.alpha_x;
        let (s, k) = (self.s(), self.k());
        let eu = self.u.exp();
        let a_x = CMat3::from_real([[n, 0.0, 0.0], [self.r, self.u_x - 2.0 * n, 0.0], [0.0, 1.0, n - self.u_x]]);
        let a_y = CMat3::from_real([[0.0, s, 0.0], [0.0, 0.0, k], [0.0, 0.0, 0.0]]);
        let s_x = s * (self.u_x - 3.0 * self.alpha_x);
        let k_x = k * (-2.0 * self.u_x + 3.0 * self.alpha_x);
        let axy = self.alpha_xy;
        let d = GaugeDerivatives {
            da_z_dzt: CMat3::real_diag([axy, self.u_xy - 2.0 * axy, axy - self.u_xy]),
            da_zt_dz: CMat3::from_real([[0.0, s_x, 0.0], [0.0, 0.0, k_x], [0.0, 0.0, 0.0]]),
            dp_dzt: CMat3::zeros(),
            dq_dz: CMat3::scaled_unit(3, 1, re(self.u_x * eu)),
            dp_dz: CMat3::zeros(),
            dq_dzt: CMat3::scaled_unit(3, 1, re(self.u_y * eu)),
        };
        Ok(GaugeData::new(
            RealityMode::UltrahyperbolicSL3R,
            a_x,
            a_y,
            CMat3::unit(1, 3),
            CMat3::scaled_unit(3, 1, re(eu)),
        )
        .with_derivs(d))
    }
}

/// Fields only (no derivative slots).
pub fn build_toda_ansatz(
    alpha: f64,
    alpha_x: f64,
    u: f64,
    u_x: f64,
    r: f64,
    b: f64,
    c: f64,
) -> Result<GaugeData, GaugeError> {
    let mut g = TodaJet { alpha, alpha_x, alpha_xy: 0.0, u, u_x, u_y: 0.0, u_xy: 0.0, r, b, c }.gauge_data()?;
    g.derivs = None;
    Ok(g)
}

/// Pointwise Toda residuals
/// `(u₁)_xy − ε₁e^{u₂−u₁} + e^{2u₁+u₂}` and `(u₂)_xy + ε₁e^{u₂−u₁} − ε₂e^{−2u₂−u₁}`
/// with the centred mixed stencil; boundary nodes hold 0.
pub fn toda_residual(
    u1: &ScalarGrid,
    u2: &ScalarGrid,
    eps1: f64,
    eps2: f64,
) -> Result<(ScalarGrid, ScalarGrid), GaugeError> {
    u1.same_shape(u2).map_err(|e| GaugeError::GridMismatch(e.to_string()))?;
    let s = u1.shape;
    let mut r1 = ScalarGrid::filled(s, 0.0);
    let mut r2 = ScalarGrid::filled(s, 0.0);
    for (i, j) in s.interior() {
        let (a, b) = (u1.at(i, j), u2.at(i, j));
        let x = (b - a).exp();
        r1.set(i, j, u1.d_dxdy(i, j) - eps1 * x + (2.0 * a + b).exp());
        r2.set(i, j, u2.d_dxdy(i, j) + eps1 * x - eps2 * (-2.0 * b - a).exp());
    }
    Ok((r1, r2))
}

/// Fields at interior node (i, j) of a Toda solution sampled in the
/// marching coordinates `(x, y')`; the gauge lives in `y = −y'`, with
/// `r = ε₁`, `b = 1`, `c = ε₂`.
pub fn toda_gauge_on_grid(
    u1: &ScalarGrid,
    u2: &ScalarGrid,
    i: usize,
    j: usize,
    eps1: f64,
    eps2: f64,
) -> Result<GaugeData, GaugeError> {
    u1.same_shape(u2).map_err(|e| GaugeError::GridMismatch(e.to_string()))?;
    let jet = TodaJet {
        alpha: u1.at(i, j),
        alpha_x: u1.d_dx(i, j),
        alpha_xy: -u1.d_dxdy(i, j),
        u: u2.at(i, j) + 2.0 * u1.at(i, j),
        u_x: u2.d_dx(i, j) + 2.0 * u1.d_dx(i, j),
        u_y: -(u2.d_dy(i, j) + 2.0 * u1.d_dy(i, j)),
        u_xy: -(u2.d_dxdy(i, j) + 2.0 * u1.d_dxdy(i, j)),
        r: eps1,
        b: 1.0,
        c: eps2,
    };
    jet.gauge_data()
}
