//! The definite affine sphere equation `ψ_zz̄ + ½e^ψ + |U|²e^{−2ψ} = 0` on a
//! grid: pointwise residual and a damped Newton solver with Dirichlet data.

use serde::{Deserialize, Serialize};

use super::{Chart, CubicDifferential, GridShape, PdeError, ScalarGrid};
use crate::banded::BandMatrix;

/// Exponent guard; larger `|ψ|` is treated as blow-up.
pub const OVERFLOW_GUARD: f64 = 50.0;

/// Newton stops once its correction is this small relative to `1 + ‖ψ‖∞`.
pub const STEP_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub max_halvings: u32,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { tol: 1e-8, max_iter: 60, max_halvings: 30 }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct NewtonStats {
    pub iterations: usize,
    /// `‖F‖∞` before the first step and after every accepted step.
    pub residual_history: Vec<f64>,
    /// Halvings used by each accepted step.
    pub halvings: Vec<u32>,
}

impl NewtonStats {
    pub fn final_residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(f64::NAN)
    }

    /// True when every accepted step strictly lowered the residual.
    pub fn is_monotone(&self) -> bool {
        self.residual_history.windows(2).all(|w| w[1] < w[0])
    }
}

fn modulus_sq(shape: &GridShape, u: &CubicDifferential) -> Result<Vec<f64>, PdeError> {
    let mut out = Vec::with_capacity(shape.len());
    for j in 0..shape.ny {
        for i in 0..shape.nx {
            out.push(if u.is_zero() { 0.0 } else { u.norm_sqr(shape.z(i, j))? });
        }
    }
    Ok(out)
}

/// Pointwise `ψ_zz̄ + ½e^ψ + |U|²e^{−2ψ}` at interior nodes; boundary nodes
/// hold 0 so that [`ScalarGrid::max_abs_interior`] and `max_abs` agree.
pub fn affine_sphere_residual(psi: &ScalarGrid, u: &CubicDifferential) -> Result<ScalarGrid, PdeError> {
    let u2 = modulus_sq(&psi.shape, u)?;
    Ok(residual_with(psi, &u2))
}

fn residual_with(psi: &ScalarGrid, u2: &[f64]) -> ScalarGrid {
    let s = psi.shape;
    let mut out = ScalarGrid::filled(s, 0.0);
    for (i, j) in s.interior() {
        let k = s.index(i, j);
        let p = psi.values[k];
        out.values[k] = psi.d_zzbar(i, j) + 0.5 * p.exp() + u2[k] * (-2.0 * p).exp();
    }
    out
}

/// Numbering of the unknowns (interior nodes) and the band it induces.
struct Layout {
    shape: GridShape,
    nodes: Vec<(usize, usize)>,
    slot: Vec<Option<usize>>,
    band: usize,
}

impl Layout {
    fn new(shape: GridShape) -> Self {
        let mut nodes = Vec::new();
        match shape.chart {
            // x-fastest: vertical neighbours are nx−2 apart
            Chart::Cartesian => {
                for j in 1..shape.ny - 1 {
                    for i in 1..shape.nx - 1 {
                        nodes.push((i, j));
                    }
                }
            }
            // angle-fastest: the periodic wrap stays within ny of the diagonal
            Chart::LogPolar => {
                for i in 1..shape.nx - 1 {
                    for j in 0..shape.ny {
                        nodes.push((i, j));
                    }
                }
            }
        }
        let mut slot = vec![None; shape.len()];
        for (k, &(i, j)) in nodes.iter().enumerate() {
            slot[shape.index(i, j)] = Some(k);
        }
        let band = match shape.chart {
            Chart::Cartesian => shape.nx - 2,
            Chart::LogPolar => shape.ny,
        };
        Layout { shape, nodes, slot, band }
    }

    /// Linear part `∂_z∂_z̄` as (neighbour node index, weight) incl. centre.
    fn stencil(&self, i: usize, j: usize) -> [((usize, usize), f64); 5] {
        let s = &self.shape;
        let scale = match s.chart {
            Chart::Cartesian => 0.25,
            Chart::LogPolar => 0.25 * (-2.0 * s.x(i)).exp(),
        };
        let (ax, ay) = (scale / (s.hx * s.hx), scale / (s.hy * s.hy));
        let (jm, jp) = if s.periodic_y() { ((j + s.ny - 1) % s.ny, (j + 1) % s.ny) } else { (j - 1, j + 1) };
        [((i, j), -2.0 * (ax + ay)), ((i - 1, j), ax), ((i + 1, j), ax), ((i, jm), ay), ((i, jp), ay)]
    }
}

/// Solves the affine sphere equation with Dirichlet data taken from the
/// boundary nodes of `boundary`; interior nodes of `init` seed Newton.
pub fn solve_affine_sphere(
    u: &CubicDifferential,
    boundary: &ScalarGrid,
    init: &ScalarGrid,
    opts: &NewtonOptions,
) -> Result<(ScalarGrid, NewtonStats), PdeError> {
    boundary.same_shape(init)?;
    let shape = boundary.shape;
    for (k, v) in boundary.values.iter().enumerate() {
        let (i, j) = (k % shape.nx, k / shape.nx);
        if shape.is_boundary(i, j) && !v.is_finite() {
            return Err(PdeError::BadGrid(format!("non-finite boundary value at ({i},{j})")));
        }
    }
    let u2 = modulus_sq(&shape, u)?;
    let layout = Layout::new(shape);

    let mut psi = init.clone();
    for j in 0..shape.ny {
        for i in 0..shape.nx {
            if shape.is_boundary(i, j) {
                psi.set(i, j, boundary.at(i, j));
            }
        }
    }
    if psi.values.iter().any(|v| !v.is_finite()) {
        return Err(PdeError::BadGrid("non-finite initial guess".into()));
    }

    let mut stats = NewtonStats::default();
    let mut res = residual_with(&psi, &u2);
    let mut norm = res.max_abs();
    stats.residual_history.push(norm);

    while norm > opts.tol {
        if stats.iterations >= opts.max_iter {
            return Err(PdeError::NonConvergence { iterations: stats.iterations, residual: norm });
        }
        let n = layout.nodes.len();
        let mut jac = BandMatrix::zeros(n, layout.band, layout.band);
        let mut rhs = vec![0.0; n];
        for (row, &(i, j)) in layout.nodes.iter().enumerate() {
            let k = shape.index(i, j);
            let p = psi.values[k];
            for ((a, b), w) in layout.stencil(i, j) {
                if let Some(col) = layout.slot[shape.index(a, b)] {
                    jac.add(row, col, w);
                }
            }
            jac.add(row, row, 0.5 * p.exp() - 2.0 * u2[k] * (-2.0 * p).exp());
            rhs[row] = -res.values[k];
        }
        jac.solve(&mut rhs).map_err(|e| PdeError::SingularJacobian { iteration: stats.iterations, pivot: e.0 })?;
        // the residual floor grows like ε/h²; a correction at round-off size
        // means no tolerance below that floor can be met
        let step = rhs.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if step <= STEP_FLOOR * (1.0 + psi.max_abs()) {
            break;
        }

        let mut alpha = 1.0;
        let mut halvings = 0;
        loop {
            let mut trial = psi.clone();
            let mut blown = false;
            for (row, &(i, j)) in layout.nodes.iter().enumerate() {
                let k = shape.index(i, j);
                trial.values[k] += alpha * rhs[row];
                blown |= trial.values[k].abs() > OVERFLOW_GUARD || !trial.values[k].is_finite();
            }
            if !blown {
                let tres = residual_with(&trial, &u2);
                let tnorm = tres.max_abs();
                if tnorm < norm {
                    psi = trial;
                    res = tres;
                    norm = tnorm;
                    break;
                }
            }
            halvings += 1;
            if halvings > opts.max_halvings {
                return Err(PdeError::NonConvergence { iterations: stats.iterations, residual: norm });
            }
            alpha *= 0.5;
        }
        stats.iterations += 1;
        stats.halvings.push(halvings);
        stats.residual_history.push(norm);
    }
    Ok((psi, stats))
}

/// Harmonic function with the boundary values of `boundary` (a convenient
/// Newton seed).
pub fn harmonic_extension(boundary: &ScalarGrid) -> Result<ScalarGrid, PdeError> {
    let shape = boundary.shape;
    let layout = Layout::new(shape);
    let n = layout.nodes.len();
    let mut a = BandMatrix::zeros(n, layout.band, layout.band);
    let mut rhs = vec![0.0; n];
    for (row, &(i, j)) in layout.nodes.iter().enumerate() {
        for ((p, q), w) in layout.stencil(i, j) {
            match layout.slot[shape.index(p, q)] {
                Some(col) => a.add(row, col, w),
                None => rhs[row] -= w * boundary.at(p, q),
            }
        }
    }
    a.solve(&mut rhs).map_err(|e| PdeError::BadGrid(format!("harmonic extension: {e}")))?;
    let mut out = boundary.clone();
    for (row, &(i, j)) in layout.nodes.iter().enumerate() {
        out.set(i, j, rhs[row]);
    }
    Ok(out)
}

/// The `U = 0` closed form `ψ = log 4 − 2 log(1 + |z|²)`.
pub fn liouville_psi(z: num_complex::Complex64) -> f64 {
    4f64.ln() - 2.0 * (1.0 + z.norm_sqr()).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_zero_residual_is_half() {
        let s = GridShape::rect(5, 5, 0.0, 1.0, 0.0, 1.0).unwrap();
        let r = affine_sphere_residual(&ScalarGrid::filled(s, 0.0), &CubicDifferential::Zero).unwrap();
        for (i, j) in s.interior() {
            assert_eq!(r.at(i, j), 0.5);
        }
    }

    #[test]
    fn pole_on_grid_is_rejected() {
        let s = GridShape::rect(5, 5, -1.0, 1.0, -1.0, 1.0).unwrap();
        let e = affine_sphere_residual(&ScalarGrid::filled(s, 0.0), &CubicDifferential::MonomialPower(2));
        assert!(matches!(e, Err(PdeError::SingularU { .. })));
    }

    #[test]
    fn harmonic_extension_reproduces_linear() {
        let s = GridShape::rect(9, 11, 0.0, 1.0, 0.0, 2.0).unwrap();
        let exact = ScalarGrid::from_xy(s, |x, y| 2.0 * x - y + 0.5);
        let h = harmonic_extension(&exact).unwrap();
        assert!(h.max_diff(&exact).unwrap() < 1e-12);
    }

    #[test]
    fn liouville_fixed_point() {
        let s = GridShape::rect(17, 17, -0.5, 0.5, -0.5, 0.5).unwrap();
        let exact = ScalarGrid::from_z(s, liouville_psi);
        let (sol, stats) =
            solve_affine_sphere(&CubicDifferential::Zero, &exact, &exact, &NewtonOptions::default()).unwrap();
        assert!(stats.iterations <= 3);
        // discretisation error at h = 1/16
        assert!(sol.max_diff(&exact).unwrap() < 2e-3);
    }
}
