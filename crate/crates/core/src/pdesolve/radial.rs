//! Radial reduction for `U = z^{−3}`, where `s = |z|`:
//! `ψ_ss + ψ_s/s + 4e^{−2ψ}/s⁶ + 2e^ψ = 0` and its first integral.

use super::PdeError;
use crate::ode::{dopri5, Tolerances};

/// Left-hand side of the radial `n = 3` equation.
pub fn radial_n3_residual(s: f64, psi: f64, psi_s: f64, psi_ss: f64) -> f64 {
    psi_ss + psi_s / s + 4.0 * (-2.0 * psi).exp() / s.powi(6) + 2.0 * psi.exp()
}

/// `c = −s²(ψ_s²/4 + ψ_s/s + e^ψ − e^{−2ψ}/s⁶)` from value and slope.
pub fn first_integral_value(s: f64, psi: f64, psi_s: f64) -> f64 {
    -s * s * (psi_s * psi_s / 4.0 + psi_s / s + psi.exp() - (-2.0 * psi).exp() / s.powi(6))
}

/// Samples of `c(s)` with `ψ_s` from three-point differences (non-uniform
/// spacing allowed, one-sided at the ends).
pub fn radial_n3_first_integral(psi: &[f64], s: &[f64]) -> Result<Vec<f64>, PdeError> {
    let n = s.len();
    if psi.len() != n || n < 3 {
        return Err(PdeError::GridMismatch(format!("{} ψ samples for {} radii", psi.len(), n)));
    }
    if s.iter().any(|&v| v <= 0.0) || s.windows(2).any(|w| w[1] <= w[0]) {
        return Err(PdeError::BadGrid("radii must be positive and increasing".into()));
    }
    let d = derivative_nonuniform(psi, s);
    Ok((0..n).map(|k| first_integral_value(s[k], psi[k], d[k])).collect())
}

/// Three-point Lagrange derivative on a non-uniform grid.
pub fn derivative_nonuniform(y: &[f64], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let lag = |k0: usize, at: usize| {
        let (x0, x1, x2) = (x[k0], x[k0 + 1], x[k0 + 2]);
        let t = x[at];
        y[k0] * (2.0 * t - x1 - x2) / ((x0 - x1) * (x0 - x2))
            + y[k0 + 1] * (2.0 * t - x0 - x2) / ((x1 - x0) * (x1 - x2))
            + y[k0 + 2] * (2.0 * t - x0 - x1) / ((x2 - x0) * (x2 - x1))
    };
    (0..n)
        .map(|k| {
            if k == 0 {
                lag(0, 0)
            } else if k + 1 == n {
                lag(n - 3, n - 1)
            } else {
                lag(k - 1, k)
            }
        })
        .collect()
}

/// Integrates the radial `n = 3` equation from `(s0, ψ0, ψ_s0)` and returns
/// `(ψ, ψ_s)` at each of `s_out`.
pub fn integrate_radial_n3(
    s0: f64,
    psi0: f64,
    dpsi0: f64,
    s_out: &[f64],
    tol: f64,
) -> Result<(Vec<f64>, Vec<f64>), PdeError> {
    let (ys, _) = dopri5(
        |s, y, d| {
            if s <= 0.0 {
                return Err("s reached 0".into());
            }
            d[0] = y[1];
            d[1] = -y[1] / s - 4.0 * (-2.0 * y[0]).exp() / s.powi(6) - 2.0 * y[0].exp();
            Ok(())
        },
        s0,
        &[psi0, dpsi0],
        s_out,
        &Tolerances::uniform(tol),
    )
    .map_err(|e| PdeError::Ode(e.to_string()))?;
    Ok((ys.iter().map(|y| y[0]).collect(), ys.iter().map(|y| y[1]).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule_identity() {
        // d/ds c(s) = −s²(ψ_s/2 + 1/s)·R for any smooth ψ.
        let psi = |s: f64| 0.3 * s.sin() - 0.1 * s * s;
        let dpsi = |s: f64| 0.3 * s.cos() - 0.2 * s;
        let ddpsi = |s: f64| -0.3 * s.sin() - 0.2;
        let c = |s: f64| first_integral_value(s, psi(s), dpsi(s));
        for &s in &[0.7, 1.1, 1.9] {
            let h = 1e-4;
            let dc = (c(s + h) - c(s - h)) / (2.0 * h);
            let r = radial_n3_residual(s, psi(s), dpsi(s), ddpsi(s));
            let expect = -s * s * (dpsi(s) / 2.0 + 1.0 / s) * r;
            assert!((dc - expect).abs() < 1e-6 * (1.0 + expect.abs()), "{dc} vs {expect}");
        }
    }

    #[test]
    fn nonuniform_derivative_exact_on_quadratics() {
        let x = [0.1, 0.3, 0.35, 0.9, 1.4];
        let y: Vec<f64> = x.iter().map(|t| 2.0 * t * t - t + 1.0).collect();
        for (d, t) in derivative_nonuniform(&y, &x).iter().zip(x) {
            assert!((d - (4.0 * t - 1.0)).abs() < 1e-12);
        }
    }
}
