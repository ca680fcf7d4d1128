//! Dormand–Prince 5(4) with step-size control.
//!
//! The integrator lands exactly on every requested output abscissa by
//! shortening the step, so no dense-output interpolant is involved and the
//! samples carry the full local accuracy of the pair. Integration runs in
//! either direction.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("integration stopped at t = {t}: {reason}")]
    Stopped { t: f64, reason: String },
    #[error("output abscissae must be monotone in the direction of integration")]
    BadOutputGrid,
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: Option<f64>,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rtol: 1e-10, atol: 1e-12, h_init: None, h_max: f64::INFINITY, max_steps: 2_000_000 }
    }
}

impl Tolerances {
    pub fn uniform(tol: f64) -> Self {
        Tolerances { rtol: tol, atol: tol, ..Default::default() }
    }
}

#[derive(Debug, Clone, Default)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evals: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth minus fourth order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates `y' = f(t, y)` from `(t0, y0)` and returns the state at each
/// entry of `t_out` (which must be monotone, moving away from `t0`).
///
/// `f` may refuse a state by returning `Err(reason)`; the integrator then
/// stops with [`OdeError::Stopped`] at the last accepted abscissa.
pub fn dopri5<F>(
    mut f: F,
    t0: f64,
    y0: &[f64],
    t_out: &[f64],
    tol: &Tolerances,
) -> Result<(Vec<Vec<f64>>, OdeStats), OdeError>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<(), String>,
{
    let n = y0.len();
    let mut stats = OdeStats::default();
    let Some(&t_last) = t_out.last() else {
        return Ok((Vec::new(), stats));
    };
    let dir = if t_last >= t0 { 1.0 } else { -1.0 };
    let mut prev = t0;
    for &t in t_out {
        if (t - prev) * dir < 0.0 {
            return Err(OdeError::BadOutputGrid);
        }
        prev = t;
    }

    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    let mut ytmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];
    let mut y = y0.to_vec();
    let mut t = t0;

    let stop = |t: f64, r: String| OdeError::Stopped { t, reason: r };
    f(t, &y, &mut k[0]).map_err(|r| stop(t, r))?;
    stats.evals += 1;

    let span = (t_last - t0).abs();
    let mut h = match tol.h_init {
        Some(h) => h,
        None => {
            // Hairer–Nørsett–Wanner starting step
            let sc: Vec<f64> = y.iter().map(|yi| tol.atol + tol.rtol * yi.abs()).collect();
            let norm =
                |v: &[f64]| (v.iter().zip(&sc).map(|(a, s)| (a / s).powi(2)).sum::<f64>() / n.max(1) as f64).sqrt();
            let (d0, d1) = (norm(&y), norm(&k[0]));
            let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
            let h0 = h0.min(span.max(1e-12));
            for i in 0..n {
                ytmp[i] = y[i] + dir * h0 * k[0][i];
            }
            stats.evals += 1;
            if f(t0 + dir * h0, &ytmp, &mut ynew).is_err() || ynew.iter().any(|v| !v.is_finite()) {
                // the probe left the admissible region; start cautiously
                h0
            } else {
                let diff: Vec<f64> = (0..n).map(|i| ynew[i] - k[0][i]).collect();
                let d2 = norm(&diff) / h0;
                let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
                (100.0 * h0).min(h1).min(span.max(1e-12))
            }
        }
    };
    h = h.min(tol.h_max).abs();

    let mut out = Vec::with_capacity(t_out.len());
    let mut next = 0;
    let mut fac_old = 1e-4_f64;
    while next < t_out.len() && (t_out[next] - t0) * dir <= 0.0 && t_out[next] == t0 {
        out.push(y.clone());
        next += 1;
    }

    while next < t_out.len() {
        if stats.accepted + stats.rejected > tol.max_steps {
            return Err(OdeError::StepUnderflow { t });
        }
        let target = t_out[next];
        let remaining = (target - t).abs();
        let mut hit = false;
        let mut hs = h;
        if hs >= remaining {
            hs = remaining;
            hit = true;
        }
        if hs < 1e-14 * t.abs().max(1.0) && !hit {
            return Err(OdeError::StepUnderflow { t });
        }
        let hd = hs * dir;

        let stage = |coefs: &[(usize, f64)], k: &Vec<Vec<f64>>, y: &[f64], out: &mut [f64]| {
            for i in 0..y.len() {
                let mut s = 0.0;
                for &(j, a) in coefs {
                    s += a * k[j][i];
                }
                out[i] = y[i] + hd * s;
            }
        };

        let mut eval =
            |tt: f64, yy: &[f64], kk: &mut Vec<f64>| -> Result<(), OdeError> { f(tt, yy, kk).map_err(|r| stop(t, r)) };

        stage(&[(0, A21)], &k, &y, &mut ytmp);
        eval(t + C2 * hd, &ytmp, &mut k[1])?;
        stage(&[(0, A31), (1, A32)], &k, &y, &mut ytmp);
        eval(t + C3 * hd, &ytmp, &mut k[2])?;
        stage(&[(0, A41), (1, A42), (2, A43)], &k, &y, &mut ytmp);
        eval(t + C4 * hd, &ytmp, &mut k[3])?;
        stage(&[(0, A51), (1, A52), (2, A53), (3, A54)], &k, &y, &mut ytmp);
        eval(t + C5 * hd, &ytmp, &mut k[4])?;
        stage(&[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)], &k, &y, &mut ytmp);
        eval(t + hd, &ytmp, &mut k[5])?;
        stage(&[(0, B1), (2, B3), (3, B4), (4, B5), (5, B6)], &k, &y, &mut ynew);
        let t_new = if hit { target } else { t + hd };
        eval(t_new, &ynew, &mut k[6])?;
        stats.evals += 6;

        let mut err = 0.0;
        for i in 0..n {
            let e = hd * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i] + E7 * k[6][i]);
            let sc = tol.atol + tol.rtol * y[i].abs().max(ynew[i].abs());
            err += (e / sc).powi(2);
        }
        let err = (err / n.max(1) as f64).sqrt();
        if !err.is_finite() {
            stats.rejected += 1;
            h = hs * 0.2;
            continue;
        }

        if err <= 1.0 {
            stats.accepted += 1;
            if ynew.iter().any(|v| !v.is_finite()) {
                return Err(OdeError::NonFinite { t: t_new });
            }
            t = t_new;
            std::mem::swap(&mut y, &mut ynew);
            k.swap(0, 6);
            if hit {
                out.push(y.clone());
                next += 1;
                while next < t_out.len() && t_out[next] == t {
                    out.push(y.clone());
                    next += 1;
                }
            }
            // PI controller (Hairer's beta = 0.04)
            let fac = err.max(1e-10).powf(0.2 - 0.04 * 0.75) * fac_old.powf(-0.04);
            let fac = (fac / 0.9).clamp(0.1, 5.0);
            fac_old = err.max(1e-4);
            // keep the natural step when we only shortened it to hit a target
            let base = if hit { h.max(hs) } else { hs };
            h = (base / fac).min(tol.h_max);
        } else {
            stats.rejected += 1;
            let fac = (err.powf(0.2) / 0.9).clamp(1.0, 10.0);
            h = hs / fac;
        }
    }
    Ok((out, stats))
}

/// One classical RK4 step for `y' = f(t, y)`.
pub fn rk4_step<F>(f: &mut F, t: f64, y: &[f64], h: f64) -> Vec<f64>
where
    F: FnMut(f64, &[f64]) -> Vec<f64>,
{
    let k1 = f(t, y);
    let y2: Vec<f64> = y.iter().zip(&k1).map(|(a, b)| a + 0.5 * h * b).collect();
    let k2 = f(t + 0.5 * h, &y2);
    let y3: Vec<f64> = y.iter().zip(&k2).map(|(a, b)| a + 0.5 * h * b).collect();
    let k3 = f(t + 0.5 * h, &y3);
    let y4: Vec<f64> = y.iter().zip(&k3).map(|(a, b)| a + h * b).collect();
    let k4 = f(t + h, &y4);
    (0..y.len()).map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_hits_outputs() {
        let ts: Vec<f64> = (0..=10).map(|i| i as f64 * 0.3).collect();
        let (ys, _) = dopri5(
            |_, y, d| {
                d[0] = -y[0];
                Ok(())
            },
            0.0,
            &[1.0],
            &ts,
            &Tolerances::uniform(1e-12),
        )
        .unwrap();
        for (t, y) in ts.iter().zip(&ys) {
            assert!((y[0] - (-t).exp()).abs() < 1e-11, "t={t}");
        }
    }

    #[test]
    fn harmonic_oscillator_backwards() {
        let ts = [-1.0, -2.0, -std::f64::consts::PI];
        let (ys, _) = dopri5(
            |_, y, d| {
                d[0] = y[1];
                d[1] = -y[0];
                Ok(())
            },
            0.0,
            &[0.0, 1.0],
            &ts,
            &Tolerances::uniform(1e-12),
        )
        .unwrap();
        for (t, y) in ts.iter().zip(&ys) {
            assert!((y[0] - t.sin()).abs() < 1e-10);
            assert!((y[1] - t.cos()).abs() < 1e-10);
        }
    }

    #[test]
    fn refusal_is_reported() {
        let r = dopri5(
            |t, _, d| {
                if t > 0.5 {
                    return Err("too far".into());
                }
                d[0] = 1.0;
                Ok(())
            },
            0.0,
            &[0.0],
            &[1.0],
            &Tolerances::default(),
        );
        assert!(matches!(r, Err(OdeError::Stopped { .. })));
    }

    #[test]
    fn non_monotone_grid_rejected() {
        let r = dopri5(
            |_, _, d| {
                d[0] = 0.0;
                Ok(())
            },
            0.0,
            &[0.0],
            &[1.0, 0.5],
            &Tolerances::default(),
        );
        assert_eq!(r.unwrap_err(), OdeError::BadOutputGrid);
    }

    #[test]
    fn rk4_is_fourth_order() {
        let mut f = |_: f64, y: &[f64]| vec![y[0]];
        let mut err = |n: usize| {
            let h = 1.0 / n as f64;
            let mut y = vec![1.0];
            for i in 0..n {
                y = rk4_step(&mut f, i as f64 * h, &y, h);
            }
            (y[0] - 1f64.exp()).abs()
        };
        let ratio = err(10) / err(20);
        assert!((ratio.log2() - 4.0).abs() < 0.2, "ratio {ratio}");
    }
}
