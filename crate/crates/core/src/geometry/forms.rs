//! Exterior derivatives of `ω` and `Ω = e1∧e2∧e3` by centred differences
//! over the six real coordinates. The `(x, y)` directions step between grid
//! nodes; the fibre directions use the same step.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::coframe::{cy_coframe, CoframeSample};
use super::GeometryError;
use crate::pdesolve::{Chart, CubicDifferential, ScalarGrid};
use crate::{re, I};

/// Fibre points `(w, ξ)` at which the forms are differentiated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBox {
    pub points: Vec<(Complex64, Complex64)>,
}

impl Default for SampleBox {
    /// Four corners of the unit box around `(w, ξ) = (1, 0)`.
    fn default() -> Self {
        let h = 0.5;
        SampleBox {
            points: vec![
                (Complex64::new(1.0 - h, -h), Complex64::new(-h, -h)),
                (Complex64::new(1.0 + h, -h), Complex64::new(h, h)),
                (Complex64::new(1.0 - h, h), Complex64::new(h, -h)),
                (Complex64::new(1.0 + h, h), Complex64::new(-h, h)),
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Su3Residuals {
    pub d_omega: f64,
    pub d_big_omega: f64,
    pub samples: usize,
}

type Omega2 = [[f64; 6]; 6];
type Omega3 = [[[Complex64; 6]; 6]; 6];

fn omega2(cs: &CoframeSample) -> Omega2 {
    let c = cs.real_coeffs();
    let mut om = [[0.0; 6]; 6];
    for a in 0..6 {
        for b in 0..6 {
            let s: Complex64 = (0..3).map(|k| c[k][a] * c[k][b].conj()).sum();
            om[a][b] = -s.im;
        }
    }
    om
}

fn det3(m: [[Complex64; 3]; 3]) -> Complex64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// `Ω_abc = det[e_k(∂_a), e_k(∂_b), e_k(∂_c)]` for `a < b < c`.
fn omega3(cs: &CoframeSample) -> Omega3 {
    let c = cs.real_coeffs();
    let mut out = [[[re(0.0); 6]; 6]; 6];
    for a in 0..6 {
        for b in a + 1..6 {
            for d in b + 1..6 {
                out[a][b][d] =
                    det3([[c[0][a], c[0][b], c[0][d]], [c[1][a], c[1][b], c[1][d]], [c[2][a], c[2][b], c[2][d]]]);
            }
        }
    }
    out
}

#[derive(Clone, Copy)]
struct Point {
    i: usize,
    j: usize,
    w: Complex64,
    xi: Complex64,
}

fn coframe_at(psi: &ScalarGrid, u: &CubicDifferential, p: &Point) -> Result<CoframeSample, GeometryError> {
    let z = psi.shape.z(p.i, p.j);
    Ok(cy_coframe(z, p.w, p.xi, psi.at(p.i, p.j), psi.d_z(p.i, p.j), u.eval(z)?))
}

/// Centred differences of `ω` and `Ω` along each real direction.
fn derivatives(
    psi: &ScalarGrid,
    u: &CubicDifferential,
    p: &Point,
) -> Result<([Omega2; 6], [Omega3; 6]), GeometryError> {
    let s = psi.shape;
    let h = s.hx;
    let mut d2 = [[[0.0; 6]; 6]; 6];
    let mut d3 = [[[[re(0.0); 6]; 6]; 6]; 6];
    for dir in 0..6 {
        let (plus, minus, step) = match dir {
            0 => (Point { i: p.i + 1, ..*p }, Point { i: p.i - 1, ..*p }, s.hx),
            1 => (Point { j: p.j + 1, ..*p }, Point { j: p.j - 1, ..*p }, s.hy),
            2 => (Point { w: p.w + h, ..*p }, Point { w: p.w - h, ..*p }, h),
            3 => (Point { w: p.w + I * h, ..*p }, Point { w: p.w - I * h, ..*p }, h),
            4 => (Point { xi: p.xi + h, ..*p }, Point { xi: p.xi - h, ..*p }, h),
            _ => (Point { xi: p.xi + I * h, ..*p }, Point { xi: p.xi - I * h, ..*p }, h),
        };
        let (cp, cm) = (coframe_at(psi, u, &plus)?, coframe_at(psi, u, &minus)?);
        let (op, om) = (omega2(&cp), omega2(&cm));
        let (tp, tm) = (omega3(&cp), omega3(&cm));
        for a in 0..6 {
            for b in 0..6 {
                d2[dir][a][b] = (op[a][b] - om[a][b]) / (2.0 * step);
                for c in 0..6 {
                    d3[dir][a][b][c] = (tp[a][b][c] - tm[a][b][c]) / (2.0 * step);
                }
            }
        }
    }
    Ok((d2, d3))
}

/// `max |dω|` and `max |dΩ|` over grid nodes at least two away from the
/// edge and the fibre sample box. Both vanish to `O(h²)` when `ψ` solves
/// the affine sphere equation.
pub fn su3_structure_residuals(
    psi: &ScalarGrid,
    u: &CubicDifferential,
    fibre: &SampleBox,
) -> Result<Su3Residuals, GeometryError> {
    let s = psi.shape;
    if s.chart != Chart::Cartesian {
        return Err(GeometryError::BadGrid("forms are differentiated on a Cartesian grid".into()));
    }
    if s.nx < 5 || s.ny < 5 {
        return Err(GeometryError::BadGrid("forms need at least 5×5 nodes".into()));
    }
    let mut dw_max = 0.0f64;
    let mut dbig_max = 0.0f64;
    let mut samples = 0;
    // ψ_z is one-sided on the boundary; differencing it at the next node in
    // would cost an order, so samples stay two nodes away from the edge
    let nodes = (2..s.ny.saturating_sub(2)).flat_map(|j| (2..s.nx.saturating_sub(2)).map(move |i| (i, j)));
    for (i, j) in nodes {
        for &(w, xi) in &fibre.points {
            let (d2, d3) = derivatives(psi, u, &Point { i, j, w, xi })?;
            for a in 0..6 {
                for b in a + 1..6 {
                    for c in b + 1..6 {
                        let v = d2[a][b][c] - d2[b][a][c] + d2[c][a][b];
                        dw_max = dw_max.max(v.abs());
                        for d in c + 1..6 {
                            let v = d3[a][b][c][d] - d3[b][a][c][d] + d3[c][a][b][d] - d3[d][a][b][c];
                            dbig_max = dbig_max.max(v.norm());
                        }
                    }
                }
            }
            samples += 1;
        }
    }
    Ok(Su3Residuals { d_omega: dw_max, d_big_omega: dbig_max, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pdesolve::GridShape;

    #[test]
    fn flat_constant_psi_without_u_is_not_a_solution() {
        // ψ = 0, U = 0 does not solve ψ_zz̄ + ½e^ψ = 0, and dΩ sees it.
        let s = GridShape::rect(7, 7, -0.1, 0.1, -0.1, 0.1).unwrap();
        let psi = ScalarGrid::filled(s, 0.0);
        let r = su3_structure_residuals(&psi, &CubicDifferential::Zero, &SampleBox::default()).unwrap();
        assert!(r.d_omega < 1e-10, "{r:?}");
        assert!(r.d_big_omega > 1e-2, "{r:?}");
        assert_eq!(r.samples, 9 * 4);
    }
}
