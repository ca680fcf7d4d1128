//! Painlevé III: the general right-hand side, the radial reductions of the
//! affine sphere equation with `U = z^{−n}`, an adaptive integrator, and the
//! 3×3 isomonodromic Lax pair.

mod lax;

pub use lax::{isomonodromy_residual, lax_identity_defect, lax_pair_at, lax_residual_matrix, LaxSample};

use std::cell::Cell;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ode::{dopri5, OdeError, Tolerances};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PainleveError {
    #[error("singular point: s = {s}, H = {h}")]
    SingularPoint { s: f64, h: f64 },
    #[error("n = 3 has no Painlevé III reduction; use the first integral of the radial n = 3 equation")]
    NEqualsThree,
    #[error("k must be +1 or -1, got {0}")]
    BadSign(i32),
    #[error("trajectory approached H = 0: last good s = {s}, H = {h:e}")]
    SingularApproach { s: f64, h: f64 },
    #[error("step size underflow at s = {s} (likely a pole of H)")]
    StepUnderflow { s: f64 },
    #[error("H must be positive, found H = {h} at s = {s}")]
    NonpositiveH { s: f64, h: f64 },
    #[error("invalid input: {0}")]
    BadInput(String),
}

/// `(α, β, γ, δ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PIIIParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl PIIIParams {
    pub const fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Self {
        PIIIParams { alpha, beta, gamma, delta }
    }

    /// The radial affine sphere case `U = z^{−2}`.
    pub const AFFINE_SPHERE: PIIIParams = PIIIParams::new(-8.0, 0.0, 0.0, -16.0);

    pub fn is_finite(&self) -> bool {
        [self.alpha, self.beta, self.gamma, self.delta].iter().all(|v| v.is_finite())
    }
}

/// `H_ss = H_s²/H − H_s/s + (αH² + β)/s + γH³ + δ/H`.
pub fn piii_rhs(s: f64, h: f64, hs: f64, p: &PIIIParams) -> Result<f64, PainleveError> {
    if s == 0.0 || h == 0.0 {
        return Err(PainleveError::SingularPoint { s, h });
    }
    Ok(hs * hs / h - hs / s + (p.alpha * h * h + p.beta) / s + p.gamma * h * h * h + p.delta / h)
}

/// The algebraic solution `H = −(2s)^{1/3}` of the affine sphere case, with
/// its first two derivatives.
pub fn algebraic_solution(s: f64) -> (f64, f64, f64) {
    let h = -(2.0 * s).cbrt();
    (h, h / (3.0 * s), -2.0 * h / (9.0 * s * s))
}

/// Exponents of the reduction: `s = (zz̄)^{s_exponent}` and
/// `ψ = log(s^{psi_power} H^k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionData {
    pub n: i32,
    pub k: i32,
    pub s_exponent: f64,
    pub psi_power: f64,
}

pub fn reduction_params(n: i32, k: i32) -> Result<(PIIIParams, ReductionData), PainleveError> {
    if n == 3 {
        return Err(PainleveError::NEqualsThree);
    }
    let d = ((3 - n) * (3 - n)) as f64;
    let p = match k {
        1 => PIIIParams::new(-8.0 / d, 0.0, 0.0, -16.0 / d),
        -1 => PIIIParams::new(0.0, 8.0 / d, 16.0 / d, 0.0),
        _ => return Err(PainleveError::BadSign(k)),
    };
    let data = ReductionData { n, k, s_exponent: (3 - n) as f64 / 4.0, psi_power: -((1 + n) as f64) / (3 - n) as f64 };
    Ok((p, data))
}

/// Samples of a PIII trajectory on increasing `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSolution {
    pub params: PIIIParams,
    pub s: Vec<f64>,
    pub h: Vec<f64>,
    pub hs: Vec<f64>,
}

impl RadialSolution {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// Spacing if the abscissae are uniform to 1e−9 relative.
    pub fn uniform_step(&self) -> Option<f64> {
        if self.s.len() < 2 {
            return None;
        }
        let h = (self.s[self.s.len() - 1] - self.s[0]) / (self.s.len() - 1) as f64;
        self.s.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs()).then_some(h)
    }

    pub fn validate(&self) -> Result<(), PainleveError> {
        if self.h.len() != self.s.len() || self.hs.len() != self.s.len() {
            return Err(PainleveError::BadInput("s, H, H_s lengths differ".into()));
        }
        if self.s.iter().any(|&s| s <= 0.0) || self.s.windows(2).any(|w| w[1] <= w[0]) {
            return Err(PainleveError::BadInput("s must be positive and increasing".into()));
        }
        if let Some(i) = self.h.iter().position(|&h| h == 0.0) {
            return Err(PainleveError::SingularPoint { s: self.s[i], h: 0.0 });
        }
        Ok(())
    }
}

/// `|H|` below this stops the integration.
pub const H_GUARD: f64 = 1e-8;

/// Samples taken by [`integrate_piii`].
pub const DEFAULT_SAMPLES: usize = 401;

/// Integrates from `(s0, H0, H_s0)` to `s_end`, sampling uniformly at
/// [`DEFAULT_SAMPLES`] points (so `s0` and `s_end` are both included).
pub fn integrate_piii(
    p: &PIIIParams,
    s0: f64,
    h0: f64,
    hs0: f64,
    s_end: f64,
    tol: f64,
) -> Result<RadialSolution, PainleveError> {
    let n = DEFAULT_SAMPLES;
    let s_out: Vec<f64> = (0..n).map(|i| s0 + (s_end - s0) * i as f64 / (n - 1) as f64).collect();
    integrate_piii_on(p, s0, h0, hs0, &s_out, tol)
}

/// Integrates from `(s0, H0, H_s0)` and samples at every entry of `s_out`
/// (strictly increasing, may lie on both sides of `s0`).
pub fn integrate_piii_on(
    p: &PIIIParams,
    s0: f64,
    h0: f64,
    hs0: f64,
    s_out: &[f64],
    tol: f64,
) -> Result<RadialSolution, PainleveError> {
    if !(s0 > 0.0) || !h0.is_finite() || !hs0.is_finite() || !p.is_finite() {
        return Err(PainleveError::BadInput(format!("s0 = {s0}, H0 = {h0}, H_s0 = {hs0}")));
    }
    if h0 == 0.0 {
        return Err(PainleveError::SingularPoint { s: s0, h: h0 });
    }
    if !(tol > 0.0) {
        return Err(PainleveError::BadInput(format!("tol = {tol}")));
    }
    if s_out.iter().any(|&s| s <= 0.0) || s_out.windows(2).any(|w| w[1] <= w[0]) {
        return Err(PainleveError::BadInput("output abscissae must be positive and increasing".into()));
    }
    let split = s_out.partition_point(|&s| s < s0);
    let back: Vec<f64> = s_out[..split].iter().rev().copied().collect();
    let fwd = &s_out[split..];
    let mut h = Vec::with_capacity(s_out.len());
    let mut hs = Vec::with_capacity(s_out.len());
    let (yb, yf) = (run(p, s0, h0, hs0, &back, tol)?, run(p, s0, h0, hs0, fwd, tol)?);
    for y in yb.iter().rev().chain(yf.iter()) {
        h.push(y[0]);
        hs.push(y[1]);
    }
    Ok(RadialSolution { params: *p, s: s_out.to_vec(), h, hs })
}

fn run(p: &PIIIParams, s0: f64, h0: f64, hs0: f64, s_out: &[f64], tol: f64) -> Result<Vec<Vec<f64>>, PainleveError> {
    if s_out.is_empty() {
        return Ok(Vec::new());
    }
    let last = Cell::new((s0, h0));
    let tol = Tolerances { rtol: tol, atol: tol * 1e-2, ..Default::default() };
    let res = dopri5(
        |s, y, d| {
            if y[0].abs() < H_GUARD || s <= 0.0 {
                return Err("H reached the guard".into());
            }
            d[0] = y[1];
            d[1] = piii_rhs(s, y[0], y[1], p).map_err(|e| e.to_string())?;
            if !d[1].is_finite() {
                return Err("non-finite H_ss".into());
            }
            last.set((s, y[0]));
            Ok(())
        },
        s0,
        &[h0, hs0],
        s_out,
        &tol,
    );
    match res {
        Ok((ys, _)) => Ok(ys),
        Err(OdeError::StepUnderflow { t }) => Err(PainleveError::StepUnderflow { s: t }),
        Err(OdeError::Stopped { t, .. }) | Err(OdeError::NonFinite { t }) => {
            Err(PainleveError::SingularApproach { s: t, h: last.get().1 })
        }
        Err(OdeError::BadOutputGrid) => Err(PainleveError::BadInput("output grid".into())),
    }
}

/// `ψ`, `ψ_s` and the z-plane radius along a radial solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialPsi {
    pub s: Vec<f64>,
    /// `ρ = s² = |z|`.
    pub rho: Vec<f64>,
    pub psi: Vec<f64>,
    pub psi_s: Vec<f64>,
}

/// `ψ = log H − 3 log s` with `|z| = s²`.
pub fn radial_to_psi(rs: &RadialSolution) -> Result<RadialPsi, PainleveError> {
    let mut out = RadialPsi {
        s: rs.s.clone(),
        rho: Vec::with_capacity(rs.len()),
        psi: Vec::with_capacity(rs.len()),
        psi_s: Vec::with_capacity(rs.len()),
    };
    for ((&s, &h), &hs) in rs.s.iter().zip(&rs.h).zip(&rs.hs) {
        if !(h > 0.0) {
            return Err(PainleveError::NonpositiveH { s, h });
        }
        out.rho.push(s * s);
        out.psi.push(h.ln() - 3.0 * s.ln());
        out.psi_s.push(hs / h - 3.0 / s);
    }
    Ok(out)
}
