use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::GeometryError;
use crate::gauge::{AffineSphereJet, GaugeError};
use crate::matalg3::CMat3;
use crate::pdesolve::{Chart, CubicDifferential, ScalarGrid};
use crate::{re, I};

/// Coefficients of `∂_z N = B_z N`, `∂_z̄ N = B_z̄ N` for the frame
/// `N = (f, f_z, f_z̄)ᵀ` of a definite affine sphere.
pub fn structure_matrices(psi: f64, psi_z: Complex64, psi_zbar: Complex64, u: Complex64) -> (CMat3, CMat3) {
    let ep = re(psi.exp());
    let em = (-psi).exp();
    let z = re(0.0);
    let one = re(1.0);
    let bz = CMat3([[z, one, z], [z, psi_z, u * em], [ep * -0.5, z, z]]);
    let bzb = CMat3([[z, z, one], [ep * -0.5, z, z], [z, u.conj() * em, psi_zbar]]);
    (bz, bzb)
}

/// `∂_z̄B_z − ∂_zB_z̄ + [B_z, B_z̄]` from an analytic jet with holomorphic
/// `U`. It equals `diag(0, R, −R)` with `R` the affine sphere residual.
pub fn structure_curvature(psi: f64, psi_z: Complex64, psi_zzbar: f64, u: Complex64) -> CMat3 {
    let (bz, bzb) = structure_matrices(psi, psi_z, psi_z.conj(), u);
    let ep = psi.exp();
    let em = (-psi).exp();
    let pzb = psi_z.conj();
    let mut dzb_bz = CMat3::zeros();
    dzb_bz.0[1][1] = re(psi_zzbar);
    dzb_bz.0[1][2] = -u * pzb * em;
    dzb_bz.0[2][0] = pzb * (-0.5 * ep);
    let mut dz_bzb = CMat3::zeros();
    dz_bzb.0[1][0] = psi_z * (-0.5 * ep);
    dz_bzb.0[2][1] = -u.conj() * psi_z * em;
    dz_bzb.0[2][2] = re(psi_zzbar);
    dzb_bz - dz_bzb + bz.commutator(&bzb)
}

/// Defect between the structure matrices and the affine sphere gauge
/// `(A_z + λP, A_z̄ + λ⁻¹Q)` transformed by
/// `g = diag(1, −√2e^{−ψ/2}, −√2e^{−ψ/2})`, which should give
/// `(−B_z, −B_z̄)` at `λ = 1`.
pub fn frame_gauge_defect(psi: f64, psi_z: Complex64, u: Complex64, lambda: Complex64) -> Result<f64, GaugeError> {
    let gd = AffineSphereJet::euclidean_on_shell(psi, psi_z, u).gauge_data()?;
    let c = -std::f64::consts::SQRT_2 * (-0.5 * psi).exp();
    let g = CMat3::real_diag([1.0, c, c]);
    let gi = CMat3::real_diag([1.0, 1.0 / c, 1.0 / c]);
    // g⁻¹∂g with ∂c/c = −½∂ψ
    let dz_g = CMat3::diag([re(0.0), psi_z * -0.5, psi_z * -0.5]);
    let dzb_g = CMat3::diag([re(0.0), psi_z.conj() * -0.5, psi_z.conj() * -0.5]);
    let az = (gd.a_z + gd.p * lambda).conjugate_by(&g, &gi) + dz_g;
    let azb = (gd.a_zt + gd.q * lambda.inv()).conjugate_by(&g, &gi) + dzb_g;
    let (bz, bzb) = structure_matrices(psi, psi_z, psi_z.conj(), u);
    Ok((az + bz).norm_max().max((azb + bzb).norm_max()))
}

/// [`frame_gauge_defect`] at the spectral value `λ = 1`.
pub fn frame_gauge_check(psi: f64, psi_z: Complex64, u: Complex64) -> Result<f64, GaugeError> {
    frame_gauge_defect(psi, psi_z, u, re(1.0))
}

/// Frame `(f, f_z, f_z̄)` of the round sphere `f = (2x, 2y, |z|²−1)/(1+|z|²)`,
/// which solves the structure equations for `e^ψ = 4/(1+|z|²)²`, `U = 0`.
pub fn sphere_frame(z: Complex64) -> CMat3 {
    let zb = z.conj();
    let d = 1.0 + z.norm_sqr();
    let f = [(z + zb) / d, -I * (z - zb) / d, re((z.norm_sqr() - 1.0) / d)];
    let fz = [(1.0 - zb * zb) / (d * d), -I * (1.0 + zb * zb) / (d * d), zb * 2.0 / (d * d)];
    let fzb = [fz[0].conj(), fz[1].conj(), fz[2].conj()];
    CMat3([f, fz, fzb])
}

/// `|det N|` below this is reported as a singular frame.
pub const DET_GUARD: f64 = 1e-12;

/// The frame on every node of a Cartesian grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameField {
    pub psi: ScalarGrid,
    pub base: (usize, usize),
    pub frames: Vec<CMat3>,
}

impl FrameField {
    pub fn at(&self, i: usize, j: usize) -> CMat3 {
        self.frames[self.psi.shape.index(i, j)]
    }

    /// Immersion `f` (the real part of the first row) at a node.
    pub fn immersion(&self, i: usize, j: usize) -> [f64; 3] {
        cone_point(&self.at(i, j), 1.0)
    }

    /// Largest `|Im f|`: the real-form pipeline should keep `f` real.
    pub fn max_imag_f(&self) -> f64 {
        self.frames.iter().flat_map(|n| n.0[0].iter().map(|v| v.im.abs())).fold(0.0, f64::max)
    }

    /// Largest `‖f_z̄ − conj(f_z)‖`.
    pub fn max_reality_defect(&self) -> f64 {
        self.frames.iter().flat_map(|n| (0..3).map(move |k| (n.0[2][k] - n.0[1][k].conj()).norm())).fold(0.0, f64::max)
    }
}

/// Samples `(ψ, ψ_z, U)` on the grid and turns them into the generators
/// along x and y: `∂_x = ∂_z + ∂_z̄`, `∂_y = i(∂_z − ∂_z̄)`.
struct Coefficients {
    bx: Vec<CMat3>,
    by: Vec<CMat3>,
}

fn coefficients(psi: &ScalarGrid, u: &CubicDifferential) -> Result<Coefficients, GeometryError> {
    if psi.shape.chart != Chart::Cartesian {
        return Err(GeometryError::BadGrid("frame integration needs a Cartesian grid".into()));
    }
    let s = psi.shape;
    let mut bx = Vec::with_capacity(s.len());
    let mut by = Vec::with_capacity(s.len());
    for j in 0..s.ny {
        for i in 0..s.nx {
            let uz = u.eval(s.z(i, j))?;
            let pz = psi.d_z(i, j);
            let (bz, bzb) = structure_matrices(psi.at(i, j), pz, pz.conj(), uz);
            bx.push(bz + bzb);
            by.push((bz - bzb) * I);
        }
    }
    Ok(Coefficients { bx, by })
}

/// One RK4 step of `N' = B N` with `B` linear in the step parameter
/// between the two end values.
fn rk4_linear(b0: &CMat3, b1: &CMat3, n: &CMat3, h: f64) -> CMat3 {
    let bm = (*b0 + *b1) * 0.5;
    let k1 = *b0 * *n;
    let k2 = bm * (*n + k1 * (0.5 * h));
    let k3 = bm * (*n + k2 * (0.5 * h));
    let k4 = *b1 * (*n + k3 * h);
    *n + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

fn check_det(n: &CMat3, i: usize, j: usize) -> Result<(), GeometryError> {
    let d = n.det().norm();
    if !(d >= DET_GUARD) {
        return Err(GeometryError::SingularFrame { i, j, det: d });
    }
    Ok(())
}

/// Integrates the structure equations from `n0` at `base`: first along the
/// base row in x, then up and down every column in y.
pub fn integrate_frame(
    psi: &ScalarGrid,
    u: &CubicDifferential,
    n0: CMat3,
    base: (usize, usize),
) -> Result<FrameField, GeometryError> {
    let s = psi.shape;
    let (i0, j0) = base;
    if i0 >= s.nx || j0 >= s.ny {
        return Err(GeometryError::BadGrid(format!("base point {base:?} is off the grid")));
    }
    let c = coefficients(psi, u)?;
    let mut frames = vec![CMat3::zeros(); s.len()];
    frames[s.index(i0, j0)] = n0;
    check_det(&n0, i0, j0)?;
    for i in i0 + 1..s.nx {
        let (a, b) = (s.index(i - 1, j0), s.index(i, j0));
        frames[b] = rk4_linear(&c.bx[a], &c.bx[b], &frames[a], s.hx);
        check_det(&frames[b], i, j0)?;
    }
    for i in (0..i0).rev() {
        let (a, b) = (s.index(i + 1, j0), s.index(i, j0));
        frames[b] = rk4_linear(&c.bx[a], &c.bx[b], &frames[a], -s.hx);
        check_det(&frames[b], i, j0)?;
    }
    for i in 0..s.nx {
        for j in j0 + 1..s.ny {
            let (a, b) = (s.index(i, j - 1), s.index(i, j));
            frames[b] = rk4_linear(&c.by[a], &c.by[b], &frames[a], s.hy);
            check_det(&frames[b], i, j)?;
        }
        for j in (0..j0).rev() {
            let (a, b) = (s.index(i, j + 1), s.index(i, j));
            frames[b] = rk4_linear(&c.by[a], &c.by[b], &frames[a], -s.hy);
            check_det(&frames[b], i, j)?;
        }
    }
    Ok(FrameField { psi: psi.clone(), base, frames })
}

/// Transports `n0` once around the rectangle with corners `(i0, j0)` and
/// `(i1, j1)` (counter-clockwise) and returns `‖N_loop − N0‖_max`.
pub fn loop_defect(
    psi: &ScalarGrid,
    u: &CubicDifferential,
    n0: CMat3,
    corner0: (usize, usize),
    corner1: (usize, usize),
) -> Result<f64, GeometryError> {
    let s = psi.shape;
    let ((i0, j0), (i1, j1)) = (corner0, corner1);
    if !(i0 < i1 && j0 < j1 && i1 < s.nx && j1 < s.ny) {
        return Err(GeometryError::BadGrid("loop corners must be ordered and on the grid".into()));
    }
    let c = coefficients(psi, u)?;
    let mut n = n0;
    for i in i0..i1 {
        n = rk4_linear(&c.bx[s.index(i, j0)], &c.bx[s.index(i + 1, j0)], &n, s.hx);
    }
    for j in j0..j1 {
        n = rk4_linear(&c.by[s.index(i1, j)], &c.by[s.index(i1, j + 1)], &n, s.hy);
    }
    for i in (i0..i1).rev() {
        n = rk4_linear(&c.bx[s.index(i + 1, j1)], &c.bx[s.index(i, j1)], &n, -s.hx);
    }
    for j in (j0..j1).rev() {
        n = rk4_linear(&c.by[s.index(i0, j + 1)], &c.by[s.index(i0, j)], &n, -s.hy);
    }
    Ok(n.dist(&n0))
}

/// Point of the cone `x = r·f` over the sphere, with `f` the first row of
/// the frame.
pub fn cone_point(n: &CMat3, r: f64) -> [f64; 3] {
    [r * n.0[0][0].re, r * n.0[0][1].re, r * n.0[0][2].re]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pdesolve::{liouville_psi, GridShape};

    #[test]
    fn liouville_origin_matrices() {
        let (bz, _) = structure_matrices(4f64.ln(), re(0.0), re(0.0), re(0.0));
        assert!(bz.dist(&CMat3::from_real([[0.0, 1.0, 0.0], [0.0; 3], [-2.0, 0.0, 0.0]])) < 1e-15);
        let (bz, _) = structure_matrices(0.0, re(0.0), re(0.0), re(1.0));
        assert_eq!(bz[(1, 2)], re(1.0));
    }

    #[test]
    fn curvature_is_the_pde_residual() {
        let (psi, pz, pzz, u) = (0.3f64, Complex64::new(0.2, -0.7), -1.1, Complex64::new(0.4, 0.5));
        let r = pzz + 0.5 * psi.exp() + u.norm_sqr() * (-2.0 * psi).exp();
        let k = structure_curvature(psi, pz, pzz, u);
        assert!(k.dist(&CMat3::real_diag([0.0, r, -r])) < 1e-14);
    }

    #[test]
    fn sphere_frame_solves_structure_equations() {
        let z = Complex64::new(0.3, -0.2);
        let h = 1e-5;
        let psi = |z: Complex64| liouville_psi(z);
        let pz = -2.0 * z.conj() / (1.0 + z.norm_sqr());
        let (bz, bzb) = structure_matrices(psi(z), pz, pz.conj(), re(0.0));
        let dx = (sphere_frame(z + h) - sphere_frame(z - h)) * (0.5 / h);
        let dy = (sphere_frame(z + I * h) - sphere_frame(z - I * h)) * (0.5 / h);
        let dz = (dx - dy * I) * 0.5;
        let dzb = (dx + dy * I) * 0.5;
        let n = sphere_frame(z);
        assert!(dz.dist(&(bz * n)) < 1e-8);
        assert!(dzb.dist(&(bzb * n)) < 1e-8);
    }

    #[test]
    fn frame_gauge_exact_case() {
        assert!(frame_gauge_check(0.0, re(0.0), re(1.0)).unwrap() <= 1e-14);
        assert!(frame_gauge_defect(0.0, re(0.0), re(1.0), re(2.0)).unwrap() > 0.1);
    }

    #[test]
    fn constant_coefficients_match_exponential() {
        // frozen ψ, U: N(x) = exp(x·B_x) N0
        let s = GridShape::rect(41, 3, 0.0, 0.4, 0.0, 0.02).unwrap();
        let psi = ScalarGrid::filled(s, 0.2);
        let u = CubicDifferential::Constant(Complex64::new(0.5, 0.1));
        let f = integrate_frame(&psi, &u, CMat3::identity(), (0, 0)).unwrap();
        let (bz, bzb) = structure_matrices(0.2, re(0.0), re(0.0), Complex64::new(0.5, 0.1));
        let b = (bz + bzb) * 0.4;
        let mut e = CMat3::identity();
        let mut term = CMat3::identity();
        for k in 1..40 {
            term = term * b * (1.0 / k as f64);
            e = e + term;
        }
        assert!(f.at(40, 0).dist(&e) < 1e-9);
    }

    #[test]
    fn cone_scaling() {
        let n = sphere_frame(Complex64::new(0.1, 0.2));
        let (a, b) = (cone_point(&n, 1.0), cone_point(&n, 2.0));
        for k in 0..3 {
            assert_eq!(b[k], 2.0 * a[k]);
        }
    }
}
