//! Travelling waves `ψ̂ = f(ξ + ξ̄)` of `ψ̂_ξξ̄ + e^ψ̂ + e^{−2ψ̂} = 0`, i.e.
//! `f'' = −(e^f + e^{−2f})` with energy `½f'² + e^f − ½e^{−2f}`.

use serde::{Deserialize, Serialize};

use super::{GridShape, PdeError, ScalarGrid};
use crate::ode::{dopri5, Tolerances};

pub fn potential(f: f64) -> f64 {
    f.exp() - 0.5 * (-2.0 * f).exp()
}

pub fn energy(f: f64, fp: f64) -> f64 {
    0.5 * fp * fp + potential(f)
}

/// Initial data for a travelling wave: `f(t0) = f0` on level `energy`,
/// moving up (`f' > 0`) when `ascending`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveSpec {
    pub energy: f64,
    pub f0: f64,
    pub t0: f64,
    pub ascending: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveProfile {
    pub spec: WaveSpec,
    pub t: Vec<f64>,
    pub f: Vec<f64>,
    pub fp: Vec<f64>,
}

impl WaveProfile {
    pub fn max_energy_drift(&self) -> f64 {
        self.f.iter().zip(&self.fp).map(|(&f, &fp)| (energy(f, fp) - self.spec.energy).abs()).fold(0.0, f64::max)
    }
}

/// Integrates the profile and samples it at `ts` (any order; points on both
/// sides of `t0` are fine).
pub fn travelling_wave_profile(spec: WaveSpec, ts: &[f64]) -> Result<WaveProfile, PdeError> {
    let v0 = potential(spec.f0);
    let gap = spec.energy - v0;
    if gap < -1e-14 * spec.energy.abs().max(1.0) {
        return Err(PdeError::ForbiddenRegion { f0: spec.f0, energy: spec.energy, potential: v0 });
    }
    let speed = (2.0 * gap.max(0.0)).sqrt();
    let fp0 = if spec.ascending { speed } else { -speed };

    let rhs = |_: f64, y: &[f64], d: &mut [f64]| {
        if y[0].abs() > super::OVERFLOW_GUARD {
            return Err(format!("|f| exceeded {} ", super::OVERFLOW_GUARD));
        }
        d[0] = y[1];
        d[1] = -(y[0].exp() + (-2.0 * y[0]).exp());
        Ok(())
    };
    let tol = Tolerances { rtol: 1e-13, atol: 1e-13, ..Default::default() };

    let mut order: Vec<usize> = (0..ts.len()).collect();
    order.sort_by(|&a, &b| ts[a].total_cmp(&ts[b]));
    let fwd: Vec<usize> = order.iter().copied().filter(|&k| ts[k] >= spec.t0).collect();
    let bwd: Vec<usize> = order.iter().rev().copied().filter(|&k| ts[k] < spec.t0).collect();

    let mut f = vec![0.0; ts.len()];
    let mut fp = vec![0.0; ts.len()];
    for idx in [fwd, bwd] {
        let targets: Vec<f64> = idx.iter().map(|&k| ts[k]).collect();
        let (ys, _) =
            dopri5(rhs, spec.t0, &[spec.f0, fp0], &targets, &tol).map_err(|e| PdeError::Ode(e.to_string()))?;
        for (k, y) in idx.iter().zip(ys) {
            f[*k] = y[0];
            fp[*k] = y[1];
        }
    }
    Ok(WaveProfile { spec, t: ts.to_vec(), f, fp })
}

/// Maps `U = 1` coordinates to the wave variable: `ψ(x) = f(c·x) + a` with
/// `c = 2^{2/3}` and `a = ⅓ log 2`.
pub const LIFT_SCALE: f64 = 1.587_401_051_968_199_4;

pub fn lift_offset() -> f64 {
    2f64.ln() / 3.0
}

/// `ψ(x + iy) = f(2^{2/3} x) + ⅓ log 2` on a Cartesian grid: a solution of the
/// affine sphere equation with `U = 1`.
pub fn lift_to_grid(spec: WaveSpec, shape: &GridShape) -> Result<(ScalarGrid, WaveProfile), PdeError> {
    let ts: Vec<f64> = (0..shape.nx).map(|i| LIFT_SCALE * shape.x(i)).collect();
    let prof = travelling_wave_profile(spec, &ts)?;
    let a = lift_offset();
    let grid = ScalarGrid::from_xy(*shape, |x, _| {
        let i = ((x - shape.x0) / shape.hx).round() as usize;
        prof.f[i] + a
    });
    Ok((grid, prof))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lift_constant() {
        assert!((LIFT_SCALE - 2f64.powf(2.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn forbidden_start() {
        let spec = WaveSpec { energy: 0.0, f0: 1.0, t0: 0.0, ascending: true };
        assert!(matches!(travelling_wave_profile(spec, &[0.5]), Err(PdeError::ForbiddenRegion { .. })));
    }

    #[test]
    fn turning_point_symmetry_and_energy() {
        let fstar = 0.2;
        let spec = WaveSpec { energy: potential(fstar), f0: fstar, t0: 0.0, ascending: true };
        let ts: Vec<f64> = (-10..=10).map(|k| k as f64 * 0.05).collect();
        let p = travelling_wave_profile(spec, &ts).unwrap();
        for k in 0..ts.len() {
            let m = ts.len() - 1 - k;
            assert!((p.f[k] - p.f[m]).abs() < 1e-10);
        }
        assert!(p.max_energy_drift() < 1e-9);
    }
}
