//! Goursat problems `u_xy = F(x, y, u)` with data on the two characteristics
//! `y = y0` and `x = x0`.
//!
//! Each cell is closed with the centred scheme
//! `u₁₁ = u₁₀ + u₀₁ − u₀₀ + hx·hy·F(x_c, y_c, ¼(u₀₀ + u₁₀ + u₀₁ + u₁₁))`,
//! solved for `u₁₁` by fixed-point iteration. The scheme is second order.

use super::{GridShape, PdeError, ScalarGrid, OVERFLOW_GUARD};

const FIXED_POINT_ITERS: usize = 100;

/// Marches a system of `N` components. `bottom[i]` is `u(x_i, y0)` and
/// `left[j]` is `u(x0, y_j)`; their first entries must agree. Returns the
/// solution x-fastest.
pub fn goursat_march<const N: usize, F>(
    shape: &GridShape,
    bottom: &[[f64; N]],
    left: &[[f64; N]],
    f: F,
) -> Result<Vec<[f64; N]>, PdeError>
where
    F: Fn(f64, f64, &[f64; N]) -> [f64; N],
{
    shape.validate()?;
    let (nx, ny) = (shape.nx, shape.ny);
    if bottom.len() != nx || left.len() != ny {
        return Err(PdeError::GridMismatch(format!(
            "characteristic data of length {}/{} for a {nx}×{ny} grid",
            bottom.len(),
            left.len()
        )));
    }
    let corner_gap = (0..N).fold(0.0_f64, |m, c| m.max((bottom[0][c] - left[0][c]).abs()));
    if corner_gap > 1e-12 * (1.0 + bottom[0].iter().fold(0.0_f64, |m, v| m.max(v.abs()))) {
        return Err(PdeError::IncompatibleCorner(corner_gap));
    }
    let hh = shape.hx * shape.hy;
    let mut u = vec![[0.0; N]; nx * ny];
    u[..nx].copy_from_slice(bottom);
    for (j, v) in left.iter().enumerate() {
        u[j * nx] = *v;
    }
    for j in 0..ny - 1 {
        let yc = shape.y0 + (j as f64 + 0.5) * shape.hy;
        for i in 0..nx - 1 {
            let xc = shape.x0 + (i as f64 + 0.5) * shape.hx;
            let u00 = u[i + nx * j];
            let u10 = u[i + 1 + nx * j];
            let u01 = u[i + nx * (j + 1)];
            let mut base = [0.0; N];
            for c in 0..N {
                base[c] = u10[c] + u01[c] - u00[c];
            }
            let mut u11 = base;
            for _ in 0..FIXED_POINT_ITERS {
                let mut avg = [0.0; N];
                for c in 0..N {
                    avg[c] = 0.25 * (u00[c] + u10[c] + u01[c] + u11[c]);
                }
                let fv = f(xc, yc, &avg);
                let mut next = [0.0; N];
                let mut change = 0.0_f64;
                for c in 0..N {
                    next[c] = base[c] + hh * fv[c];
                    change = change.max((next[c] - u11[c]).abs());
                }
                u11 = next;
                if u11.iter().any(|v| !v.is_finite() || v.abs() > OVERFLOW_GUARD) {
                    return Err(PdeError::Blowup { i: i + 1, j: j + 1 });
                }
                if change <= 1e-15 * (1.0 + u11.iter().fold(0.0_f64, |m, v| m.max(v.abs()))) {
                    break;
                }
            }
            u[i + 1 + nx * (j + 1)] = u11;
        }
    }
    Ok(u)
}

/// `u_xy = e^u − ε e^{−2u}` from characteristic data.
pub fn tzitzeica_march(shape: &GridShape, bottom: &[f64], left: &[f64], epsilon: f64) -> Result<ScalarGrid, PdeError> {
    tzitzeica_march_forced(shape, bottom, left, epsilon, |_, _| 0.0)
}

/// As [`tzitzeica_march`] with an extra source `u_xy = e^u − εe^{−2u} + g(x, y)`,
/// for manufactured-solution checks.
pub fn tzitzeica_march_forced(
    shape: &GridShape,
    bottom: &[f64],
    left: &[f64],
    epsilon: f64,
    forcing: impl Fn(f64, f64) -> f64,
) -> Result<ScalarGrid, PdeError> {
    let b: Vec<[f64; 1]> = bottom.iter().map(|&v| [v]).collect();
    let l: Vec<[f64; 1]> = left.iter().map(|&v| [v]).collect();
    let u = goursat_march(shape, &b, &l, |x, y, u| [u[0].exp() - epsilon * (-2.0 * u[0]).exp() + forcing(x, y)])?;
    ScalarGrid::new(*shape, u.into_iter().map(|v| v[0]).collect())
}

/// The ℤ₃ Toda pair
/// `(u₁)_xy = ε₁e^{u₂−u₁} − e^{2u₁+u₂}`, `(u₂)_xy = −ε₁e^{u₂−u₁} + ε₂e^{−2u₂−u₁}`.
pub fn toda_march(
    shape: &GridShape,
    bottom: &[[f64; 2]],
    left: &[[f64; 2]],
    eps1: f64,
    eps2: f64,
) -> Result<(ScalarGrid, ScalarGrid), PdeError> {
    let u = goursat_march(shape, bottom, left, |_, _, u| {
        let a = (u[1] - u[0]).exp();
        [eps1 * a - (2.0 * u[0] + u[1]).exp(), -eps1 * a + eps2 * (-2.0 * u[1] - u[0]).exp()]
    })?;
    Ok((
        ScalarGrid::new(*shape, u.iter().map(|v| v[0]).collect())?,
        ScalarGrid::new(*shape, u.iter().map(|v| v[1]).collect())?,
    ))
}

/// Interior residual of `u_xy − e^u + ε e^{−2u}` with the centred stencil.
pub fn tzitzeica_residual_grid(u: &ScalarGrid, epsilon: f64) -> ScalarGrid {
    let s = u.shape;
    let mut out = ScalarGrid::filled(s, 0.0);
    for (i, j) in s.interior() {
        let v = u.at(i, j);
        out.set(i, j, u.d_dxdy(i, j) - v.exp() + epsilon * (-2.0 * v).exp());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(n: usize, side: f64) -> GridShape {
        GridShape::rect(n, n, 0.0, side, 0.0, side).unwrap()
    }

    #[test]
    fn zero_data_plus_sign_is_exactly_zero() {
        let s = square(21, 1.0);
        let u = tzitzeica_march(&s, &[0.0; 21], &[0.0; 21], 1.0).unwrap();
        assert!(u.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn manufactured_xy() {
        // u = xy: u_xy = 1, forcing = 1 − e^{xy} + εe^{−2xy}. Bilinear data is
        // reproduced by the cell average, so only rounding remains.
        let n = 17;
        let s = square(n, 1.0);
        let u = tzitzeica_march_forced(&s, &vec![0.0; n], &vec![0.0; n], 1.0, |x, y| {
            1.0 - (x * y).exp() + (-2.0 * x * y).exp()
        })
        .unwrap();
        let exact = ScalarGrid::from_xy(s, |x, y| x * y);
        assert!(u.max_diff(&exact).unwrap() < 1e-12);
    }

    #[test]
    fn manufactured_smooth_is_second_order() {
        let exact = |x: f64, y: f64| 0.5 * (x + 2.0 * y).sin();
        let err = |n: usize| {
            let s = square(n, 1.0);
            let b: Vec<f64> = (0..n).map(|i| exact(s.x(i), 0.0)).collect();
            let l: Vec<f64> = (0..n).map(|j| exact(0.0, s.y(j))).collect();
            let u = tzitzeica_march_forced(&s, &b, &l, -1.0, |x, y| {
                let v = exact(x, y);
                -(x + 2.0 * y).sin() - v.exp() - (-2.0 * v).exp()
            })
            .unwrap();
            u.max_diff(&ScalarGrid::from_xy(s, exact)).unwrap()
        };
        let (e1, e2) = (err(17), err(33));
        let slope = (e1 / e2).log2();
        assert!((slope - 2.0).abs() < 0.3, "slope {slope}");
    }

    #[test]
    fn blowup_is_reported() {
        let s = square(41, 20.0);
        let r = tzitzeica_march(&s, &vec![0.0; 41], &vec![0.0; 41], -1.0);
        assert!(matches!(r, Err(PdeError::Blowup { .. })));
    }

    #[test]
    fn corner_mismatch() {
        let s = square(5, 1.0);
        let r = tzitzeica_march(&s, &[1.0, 0.0, 0.0, 0.0, 0.0], &[0.0; 5], 1.0);
        assert!(matches!(r, Err(PdeError::IncompatibleCorner(_))));
    }
}
