use nalgebra::{DMatrix, Matrix6};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::GeometryError;
use crate::{re, I};

/// Complex differentials, in coefficient order.
pub const COMPLEX_BASIS: [&str; 6] = ["dz", "dzbar", "dw", "dwbar", "dxi", "dxibar"];
/// Real coordinates, in coefficient order.
pub const REAL_BASIS: [&str; 6] = ["x", "y", "Re w", "Im w", "Re xi", "Im xi"];

/// The unitary coframe `(e1, e2, e3)` of the semi-flat metric at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoframeSample {
    pub z: Complex64,
    pub w: Complex64,
    pub xi: Complex64,
    pub psi: f64,
    pub psi_z: Complex64,
    pub u: Complex64,
    /// Row `k` holds `e_{k+1}` over [`COMPLEX_BASIS`].
    pub coeffs: [[Complex64; 6]; 3],
}

impl CoframeSample {
    /// Coefficients over the real differentials of [`REAL_BASIS`]:
    /// `p da + q dā = (p + q) d(Re a) + i(p − q) d(Im a)`.
    pub fn real_coeffs(&self) -> [[Complex64; 6]; 3] {
        let mut out = [[re(0.0); 6]; 3];
        for (k, row) in self.coeffs.iter().enumerate() {
            for pair in 0..3 {
                let (p, q) = (row[2 * pair], row[2 * pair + 1]);
                out[k][2 * pair] = p + q;
                out[k][2 * pair + 1] = I * (p - q);
            }
        }
        out
    }

    /// The row of `e_k` under the formal swap `z ↔ z̄`, `ξ ↔ ξ̄`, `U ↔ Ū`,
    /// `ψ_z ↔ ψ_z̄` (with `i` and `w` left alone).
    pub fn swapped_row(&self, k: usize) -> [Complex64; 6] {
        let r = self.coeffs[k];
        [r[1], r[0], r[2], r[3], r[5], r[4]]
    }
}

/// `e1 = dw − (i/2)e^ψ(ξ̄dz + ξdz̄)`,
/// `e2 = (e^{ψ/2}/√2)((w + iξψ_z)dz + i(dξ + e^{−ψ}Ūξ̄dz̄))`,
/// `e3 = (e^{ψ/2}/√2)(i(dξ̄ + e^{−ψ}Uξdz) + (w + iξ̄ψ_z̄)dz̄)`.
pub fn cy_coframe(
    z: Complex64,
    w: Complex64,
    xi: Complex64,
    psi: f64,
    psi_z: Complex64,
    u: Complex64,
) -> CoframeSample {
    let ep = psi.exp();
    let em = (-psi).exp();
    let a = (0.5 * psi).exp() * std::f64::consts::FRAC_1_SQRT_2;
    let zero = re(0.0);
    let xib = xi.conj();
    let e1 = [-I * 0.5 * ep * xib, -I * 0.5 * ep * xi, re(1.0), zero, zero, zero];
    let e2 = [(w + I * xi * psi_z) * a, I * em * u.conj() * xib * a, zero, zero, I * a, zero];
    let e3 = [I * em * u * xi * a, (w + I * xib * psi_z.conj()) * a, zero, zero, zero, I * a];
    CoframeSample { z, w, xi, psi, psi_z, u, coeffs: [e1, e2, e3] }
}

/// `g = Σ e_k ē_k` and `ω = (i/2)Σ e_k ∧ ē_k` as real 6×6 matrices over
/// [`REAL_BASIS`]: `g_ab = Re Σ e_k(∂_a) conj(e_k(∂_b))`,
/// `ω_ab = −Im Σ e_k(∂_a) conj(e_k(∂_b))`.
pub fn assemble_g_omega(cs: &CoframeSample) -> Result<(Matrix6<f64>, Matrix6<f64>), GeometryError> {
    let c = cs.real_coeffs();
    let mut g = Matrix6::zeros();
    let mut om = Matrix6::zeros();
    for a in 0..6 {
        for b in 0..6 {
            let s: Complex64 = (0..3).map(|k| c[k][a] * c[k][b].conj()).sum();
            g[(a, b)] = s.re;
            om[(a, b)] = -s.im;
        }
    }
    if g.cholesky().is_none() {
        return Err(GeometryError::DegenerateFrame);
    }
    Ok((g, om))
}

/// Complex structure making `e1, e2, e3` type (1,0): `e_k(JX) = i e_k(X)`.
pub fn complex_structure(cs: &CoframeSample) -> Result<Matrix6<f64>, GeometryError> {
    let c = cs.real_coeffs();
    let mut e = Matrix6::zeros();
    for k in 0..3 {
        for a in 0..6 {
            e[(2 * k, a)] = c[k][a].re;
            e[(2 * k + 1, a)] = c[k][a].im;
        }
    }
    let ei = e.try_inverse().ok_or(GeometryError::DegenerateFrame)?;
    let mut j0 = Matrix6::zeros();
    for k in 0..3 {
        j0[(2 * k, 2 * k + 1)] = -1.0;
        j0[(2 * k + 1, 2 * k)] = 1.0;
    }
    Ok(ei * j0 * e)
}

fn pfaffian6(m: &Matrix6<f64>) -> f64 {
    fn pf(m: &Matrix6<f64>, idx: &[usize]) -> f64 {
        if idx.is_empty() {
            return 1.0;
        }
        let first = idx[0];
        let mut total = 0.0;
        for (k, &j) in idx.iter().enumerate().skip(1) {
            let rest: Vec<usize> = idx.iter().copied().filter(|&x| x != first && x != j).collect();
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            total += sign * m[(first, j)] * pf(m, &rest);
        }
        total
    }
    pf(m, &[0, 1, 2, 3, 4, 5])
}

/// `Ω∧Ω̄ / ω³` as a ratio of top-degree coefficients, with `Ω = e1∧e2∧e3`.
/// Constant over all points for any nondegenerate coframe.
pub fn volume_ratio(cs: &CoframeSample) -> Result<Complex64, GeometryError> {
    let c = cs.real_coeffs();
    let mut m = DMatrix::<Complex64>::zeros(6, 6);
    for k in 0..3 {
        for a in 0..6 {
            m[(k, a)] = c[k][a];
            m[(k + 3, a)] = c[k][a].conj();
        }
    }
    let (_, om) = assemble_g_omega(cs)?;
    // ω³ = 3!·Pf(ω)·vol
    Ok(m.determinant() / (6.0 * pfaffian6(&om)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn liouville_origin() {
        let w = Complex64::new(0.7, 0.3);
        let cs = cy_coframe(re(0.0), w, re(0.0), 4f64.ln(), re(0.0), re(0.0));
        let s2 = std::f64::consts::SQRT_2;
        assert_eq!(cs.coeffs[0], [re(0.0), re(0.0), re(1.0), re(0.0), re(0.0), re(0.0)]);
        assert!((cs.coeffs[1][0] - w * s2).norm() < 1e-15);
        assert!((cs.coeffs[1][4] - I * s2).norm() < 1e-15);
        assert!(cs.coeffs[1][1].norm() < 1e-15);
    }

    #[test]
    fn e1_is_dw_at_zero_fibre() {
        let cs = cy_coframe(
            Complex64::new(0.3, 0.2),
            re(1.0),
            re(0.0),
            0.4,
            Complex64::new(1.0, -2.0),
            Complex64::new(3.0, 1.0),
        );
        assert_eq!(cs.coeffs[0], [re(0.0), re(0.0), re(1.0), re(0.0), re(0.0), re(0.0)]);
    }

    #[test]
    fn flat_model_is_positive_definite() {
        let cs = cy_coframe(re(0.0), re(1.0), re(0.0), 0.0, re(0.0), re(0.0));
        let (g, om) = assemble_g_omega(&cs).unwrap();
        assert!((g - g.transpose()).abs().max() == 0.0);
        assert!((om + om.transpose()).abs().max() == 0.0);
        // e2 and e3 each contribute ½ to the base directions
        assert!((g[(0, 0)] - 1.0).abs() < 1e-15 && (g[(1, 1)] - 1.0).abs() < 1e-15);
        assert!((g[(2, 2)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn homothety_norm_is_twice_the_potential() {
        // V = r ∂_r with r = Re w: g(V, V) = r² = 2φ
        let r = 1.7;
        let cs = cy_coframe(
            Complex64::new(0.2, 0.1),
            Complex64::new(r, 0.4),
            Complex64::new(0.3, -0.2),
            0.3,
            re(0.1),
            re(0.5),
        );
        let (g, _) = assemble_g_omega(&cs).unwrap();
        assert!((g[(2, 2)] * r * r - r * r).abs() < 1e-14);
    }

    #[test]
    fn pfaffian_of_standard_form() {
        let mut m = Matrix6::zeros();
        for k in 0..3 {
            m[(2 * k, 2 * k + 1)] = (k + 2) as f64;
            m[(2 * k + 1, 2 * k)] = -((k + 2) as f64);
        }
        assert_eq!(pfaffian6(&m), 24.0);
        assert!((pfaffian6(&m).powi(2) - m.determinant()).abs() < 1e-9);
    }
}
