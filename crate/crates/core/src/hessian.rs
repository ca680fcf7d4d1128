//! Graphs over the `r = 1` slice of a cone with a degree-two homogeneous
//! Hessian potential: the induced metric, the Tzitzéica condition, and the
//! Legendre transform to the dual Monge–Ampère form. Surfaces are graphs
//! over `ℝ²`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pdesolve::{Chart, GridShape, PdeError, ScalarGrid};

/// Dimension of the base.
pub const N: usize = 2;

pub type Sym2 = [[f64; 2]; 2];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HessianError {
    #[error("support function x·∇v − v vanishes at ({x}, {y})")]
    VanishingSupport { x: f64, y: f64 },
    #[error("gradient cannot be inverted at p = ({px}, {py}): {reason}")]
    NonInvertibleGradient { px: f64, py: f64, reason: String },
    #[error("w vanishes at ({x}, {y})")]
    VanishingW { x: f64, y: f64 },
    #[error("invalid grid: {0}")]
    BadGrid(String),
    #[error(transparent)]
    Pde(#[from] PdeError),
}

/// Value, gradient and Hessian at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jet2 {
    pub x: [f64; 2],
    pub v: f64,
    pub grad: [f64; 2],
    pub hess: Sym2,
}

impl Jet2 {
    /// `x·∇v − v`.
    pub fn support(&self) -> f64 {
        self.x[0] * self.grad[0] + self.x[1] * self.grad[1] - self.v
    }

    pub fn det_hess(&self) -> f64 {
        det2(&self.hess)
    }
}

pub fn det2(m: &Sym2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn inv2(m: &Sym2) -> Option<Sym2> {
    let d = det2(m);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    Some([[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]])
}

/// A graph function known analytically (value, gradient, Hessian).
#[derive(Clone)]
pub struct GraphFunction {
    pub label: String,
    f: Arc<dyn Fn([f64; 2]) -> Jet2 + Send + Sync>,
}

impl std::fmt::Debug for GraphFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GraphFunction({})", self.label)
    }
}

impl GraphFunction {
    pub fn new(label: impl Into<String>, f: impl Fn([f64; 2]) -> Jet2 + Send + Sync + 'static) -> Self {
        GraphFunction { label: label.into(), f: Arc::new(f) }
    }

    pub fn jet(&self, x: [f64; 2]) -> Jet2 {
        (self.f)(x)
    }

    pub fn sample(&self, shape: GridShape) -> ScalarGrid {
        ScalarGrid::from_xy(shape, |x, y| self.jet([x, y]).v)
    }

    /// Upper unit hemisphere `v = (1 − |x|²)^{1/2}`.
    pub fn sphere() -> Self {
        GraphFunction::new("sphere", |x| {
            let v = (1.0 - x[0] * x[0] - x[1] * x[1]).sqrt();
            let v3 = v * v * v;
            Jet2 {
                x,
                v,
                grad: [-x[0] / v, -x[1] / v],
                hess: [
                    [-1.0 / v - x[0] * x[0] / v3, -x[0] * x[1] / v3],
                    [-x[0] * x[1] / v3, -1.0 / v - x[1] * x[1] / v3],
                ],
            }
        })
    }

    /// The Legendre dual of the hemisphere, `w = −(1 + |p|²)^{1/2}`.
    pub fn sphere_dual() -> Self {
        GraphFunction::new("sphere dual", |p| {
            let q = 1.0 + p[0] * p[0] + p[1] * p[1];
            let s = q.sqrt();
            let s3 = q * s;
            Jet2 {
                x: p,
                v: -s,
                grad: [-p[0] / s, -p[1] / s],
                hess: [[-(q - p[0] * p[0]) / s3, p[0] * p[1] / s3], [p[0] * p[1] / s3, -(q - p[1] * p[1]) / s3]],
            }
        })
    }

    /// `v(M x)` for a constant 2×2 matrix `M`.
    pub fn composed(&self, m: Sym2) -> Self {
        let inner = self.clone();
        GraphFunction::new(format!("{}∘M", self.label), move |x| {
            let y = [m[0][0] * x[0] + m[0][1] * x[1], m[1][0] * x[0] + m[1][1] * x[1]];
            let j = inner.jet(y);
            let g = [m[0][0] * j.grad[0] + m[1][0] * j.grad[1], m[0][1] * j.grad[0] + m[1][1] * j.grad[1]];
            let mut h = [[0.0; 2]; 2];
            for a in 0..2 {
                for b in 0..2 {
                    for c in 0..2 {
                        for d in 0..2 {
                            h[a][b] += m[c][a] * j.hess[c][d] * m[d][b];
                        }
                    }
                }
            }
            Jet2 { x, v: j.v, grad: g, hess: h }
        })
    }
}

/// Centred-difference jet at an interior node of a Cartesian grid.
pub fn jet_at(v: &ScalarGrid, i: usize, j: usize) -> Jet2 {
    let s = v.shape;
    let (hx, hy) = (s.hx, s.hy);
    let c = v.at(i, j);
    let vxx = (v.at(i + 1, j) - 2.0 * c + v.at(i - 1, j)) / (hx * hx);
    let vyy = (v.at(i, j + 1) - 2.0 * c + v.at(i, j - 1)) / (hy * hy);
    let vxy = v.d_dxdy(i, j);
    Jet2 { x: [s.x(i), s.y(j)], v: c, grad: [v.d_dx(i, j), v.d_dy(i, j)], hess: [[vxx, vxy], [vxy, vyy]] }
}

fn check_cartesian(g: &ScalarGrid) -> Result<(), HessianError> {
    if g.shape.chart != Chart::Cartesian || g.shape.nx < 3 || g.shape.ny < 3 {
        return Err(HessianError::BadGrid("need a Cartesian grid with at least 3×3 nodes".into()));
    }
    Ok(())
}

/// `h_αβ = v_αβ / (x^γ ∂_γ v − v)` at one point.
pub fn graph_metric_at(jet: &Jet2) -> Result<Sym2, HessianError> {
    let d = jet.support();
    if d == 0.0 || !d.is_finite() {
        return Err(HessianError::VanishingSupport { x: jet.x[0], y: jet.x[1] });
    }
    Ok([[jet.hess[0][0] / d, jet.hess[0][1] / d], [jet.hess[1][0] / d, jet.hess[1][1] / d]])
}

/// Induced metric at interior nodes from centred differences; boundary
/// entries hold zero.
pub fn graph_metric(v: &ScalarGrid) -> Result<ScalarGrid<Sym2>, HessianError> {
    check_cartesian(v)?;
    let mut out = ScalarGrid::filled(v.shape, [[0.0; 2]; 2]);
    for (i, j) in v.shape.interior() {
        out.set(i, j, graph_metric_at(&jet_at(v, i, j))?);
    }
    Ok(out)
}

/// `det v_αβ ∓ (v − x^α∂_αv)^{n+2}` at one point; `sign` is `+1` for
/// positive Gaussian curvature.
pub fn tzitzeica_residual_at(jet: &Jet2, sign: i32) -> f64 {
    jet.det_hess() - sign.signum() as f64 * (-jet.support()).powi(N as i32 + 2)
}

/// [`tzitzeica_residual_at`] at interior nodes; boundary entries hold zero.
pub fn tzitzeica_residual(v: &ScalarGrid, sign: i32) -> Result<ScalarGrid, HessianError> {
    check_cartesian(v)?;
    let mut out = ScalarGrid::filled(v.shape, 0.0);
    for (i, j) in v.shape.interior() {
        out.set(i, j, tzitzeica_residual_at(&jet_at(v, i, j), sign));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LegendreOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for LegendreOptions {
    fn default() -> Self {
        LegendreOptions { tol: 1e-13, max_iter: 50 }
    }
}

/// `w(p) = x·∇v − v` sampled on a grid in `p`, with the preimages `x(p)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LegendreDual {
    pub w: ScalarGrid,
    pub preimage: Vec<[f64; 2]>,
    pub newton_tol: f64,
}

impl LegendreDual {
    /// Applying the transform again: at `x(p)`, `v = p·x − w`.
    pub fn inverse_samples(&self) -> Vec<([f64; 2], f64)> {
        let s = self.w.shape;
        let mut out = Vec::with_capacity(s.len());
        for j in 0..s.ny {
            for i in 0..s.nx {
                let x = self.preimage[s.index(i, j)];
                out.push((x, s.x(i) * x[0] + s.y(j) * x[1] - self.w.at(i, j)));
            }
        }
        out
    }
}

fn newton_gradient(
    v: &GraphFunction,
    p: [f64; 2],
    seed: [f64; 2],
    opts: &LegendreOptions,
) -> Result<[f64; 2], HessianError> {
    let fail = |reason: String| HessianError::NonInvertibleGradient { px: p[0], py: p[1], reason };
    let mut x = seed;
    for _ in 0..opts.max_iter {
        let j = v.jet(x);
        let r = [j.grad[0] - p[0], j.grad[1] - p[1]];
        if !(r[0].is_finite() && r[1].is_finite()) {
            return Err(fail(format!("left the domain of v at x = {x:?}")));
        }
        let scale = 1.0 + p[0].abs().max(p[1].abs());
        if r[0].abs().max(r[1].abs()) <= opts.tol * scale {
            return Ok(x);
        }
        let hi = inv2(&j.hess).ok_or_else(|| fail("degenerate Hessian".into()))?;
        let dx = [hi[0][0] * r[0] + hi[0][1] * r[1], hi[1][0] * r[0] + hi[1][1] * r[1]];
        // damp so the iterate stays where v is defined
        let mut t = 1.0;
        loop {
            let trial = [x[0] - t * dx[0], x[1] - t * dx[1]];
            let tj = v.jet(trial);
            if tj.grad.iter().all(|g| g.is_finite()) && tj.v.is_finite() {
                x = trial;
                break;
            }
            t *= 0.5;
            if t < 1e-12 {
                return Err(fail("Newton step cannot stay in the domain".into()));
            }
        }
    }
    Err(fail(format!("no convergence in {} iterations", opts.max_iter)))
}

/// Legendre transform of `v` onto the grid `p_shape`: each node solves
/// `∇v(x) = p` by Newton, seeded from the previously solved neighbour
/// (rows swept outward from `x = 0`).
pub fn legendre(v: &GraphFunction, p_shape: GridShape, opts: &LegendreOptions) -> Result<LegendreDual, HessianError> {
    if p_shape.chart != Chart::Cartesian {
        return Err(HessianError::BadGrid("p grid must be Cartesian".into()));
    }
    let s = p_shape;
    let mut pre = vec![[f64::NAN; 2]; s.len()];
    let mut w = ScalarGrid::filled(s, 0.0);
    for j in 0..s.ny {
        for i in 0..s.nx {
            let p = [s.x(i), s.y(j)];
            let seed = if i > 0 {
                pre[s.index(i - 1, j)]
            } else if j > 0 {
                pre[s.index(0, j - 1)]
            } else {
                [0.0, 0.0]
            };
            let x = newton_gradient(v, p, seed, opts).or_else(|_| newton_gradient(v, p, [0.0, 0.0], opts))?;
            pre[s.index(i, j)] = x;
            w.set(i, j, v.jet(x).support());
        }
    }
    Ok(LegendreDual { w, preimage: pre, newton_tol: opts.tol })
}

/// `det w_pp − 1/w^{n+2}` at one point.
pub fn dual_ma_residual_at(jet: &Jet2) -> Result<f64, HessianError> {
    if jet.v == 0.0 {
        return Err(HessianError::VanishingW { x: jet.x[0], y: jet.x[1] });
    }
    Ok(jet.det_hess() - 1.0 / jet.v.powi(N as i32 + 2))
}

/// [`dual_ma_residual_at`] from centred differences at interior nodes;
/// boundary entries hold zero.
pub fn dual_ma_residual(w: &LegendreDual) -> Result<ScalarGrid, HessianError> {
    check_cartesian(&w.w)?;
    let mut out = ScalarGrid::filled(w.w.shape, 0.0);
    for (i, j) in w.w.shape.interior() {
        out.set(i, j, dual_ma_residual_at(&jet_at(&w.w, i, j))?);
    }
    Ok(out)
}

/// `(1/w) w_pp` at one point of the dual.
pub fn dual_metric_at(jet: &Jet2) -> Result<Sym2, HessianError> {
    if jet.v == 0.0 {
        return Err(HessianError::VanishingW { x: jet.x[0], y: jet.x[1] });
    }
    let k = 1.0 / jet.v;
    Ok([[jet.hess[0][0] * k, jet.hess[0][1] * k], [jet.hess[1][0] * k, jet.hess[1][1] * k]])
}

/// Pulls a metric in `p` back to `x` along `dp = v_xx dx`.
pub fn pull_back(h_p: &Sym2, v_hess: &Sym2) -> Sym2 {
    let mut out = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                for d in 0..2 {
                    out[a][b] += v_hess[c][a] * h_p[c][d] * v_hess[d][b];
                }
            }
        }
    }
    out
}

pub fn is_positive_definite(m: &Sym2) -> bool {
    m[0][0] > 0.0 && det2(m) > 0.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_metric_at_origin_is_identity() {
        let h = graph_metric_at(&GraphFunction::sphere().jet([0.0, 0.0])).unwrap();
        assert_eq!(h, [[1.0, 0.0], [0.0, 1.0]]);
    }

    #[test]
    fn quadratic_has_vanishing_support_at_origin() {
        let q = GraphFunction::new("half square", |x| Jet2 {
            x,
            v: 0.5 * (x[0] * x[0] + x[1] * x[1]),
            grad: x,
            hess: [[1.0, 0.0], [0.0, 1.0]],
        });
        assert!(matches!(graph_metric_at(&q.jet([0.0, 0.0])), Err(HessianError::VanishingSupport { .. })));
    }

    #[test]
    fn sphere_satisfies_tzitzeica_condition() {
        let s = GraphFunction::sphere();
        for x in [[0.0, 0.0], [0.3, -0.2], [-0.5, 0.4]] {
            assert!(tzitzeica_residual_at(&s.jet(x), 1).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_function_residual() {
        let l = GraphFunction::new("linear", |x| Jet2 {
            x,
            v: 2.0 + x[0] - 3.0 * x[1],
            grad: [1.0, -3.0],
            hess: [[0.0; 2]; 2],
        });
        let j = l.jet([0.4, 0.1]);
        // v − x·∇v = 2
        assert!((tzitzeica_residual_at(&j, 1) + 16.0).abs() < 1e-12);
        assert!((tzitzeica_residual_at(&j, -1) - 16.0).abs() < 1e-12);
    }

    #[test]
    fn sphere_dual_values() {
        let d = GraphFunction::sphere_dual();
        assert_eq!(d.jet([0.0, 0.0]).v, -1.0);
        for p in [[0.0, 0.0], [0.7, -1.2]] {
            assert!(dual_ma_residual_at(&d.jet(p)).unwrap().abs() < 1e-12);
        }
        let c = GraphFunction::new("const", |x| Jet2 { x, v: 2.0, grad: [0.0; 2], hess: [[0.0; 2]; 2] });
        assert_eq!(dual_ma_residual_at(&c.jet([0.0, 0.0])).unwrap(), -1.0 / 16.0);
    }

    #[test]
    fn legendre_of_sphere() {
        let s = GridShape::rect(5, 5, -1.0, 1.0, -1.0, 1.0).unwrap();
        let d = legendre(&GraphFunction::sphere(), s, &LegendreOptions::default()).unwrap();
        let exact = GraphFunction::sphere_dual();
        for j in 0..5 {
            for i in 0..5 {
                let w = exact.jet([s.x(i), s.y(j)]).v;
                assert!((d.w.at(i, j) - w).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn metrics_agree_through_the_transform() {
        let v = GraphFunction::sphere();
        let x = [0.3, 0.25];
        let jv = v.jet(x);
        let hw = dual_metric_at(&GraphFunction::sphere_dual().jet(jv.grad)).unwrap();
        let h = graph_metric_at(&jv).unwrap();
        let pb = pull_back(&hw, &jv.hess);
        for a in 0..2 {
            for b in 0..2 {
                assert!((pb[a][b] - h[a][b]).abs() < 1e-12);
            }
        }
        assert!(is_positive_definite(&h) && is_positive_definite(&hw));
    }
}
