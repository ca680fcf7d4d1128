//! The 3×3 isomonodromic pair `Ψ_ζ = LΨ`, `Ψ_s = MΨ` for the affine sphere
//! Painlevé III, written as Laurent polynomials in `ζ`:
//! `L = C₋₂ζ⁻² + C₋₁ζ⁻¹ + C₀`, `M = D₋₁ζ⁻¹ + D₀ + D₁ζ`.
//! Compatibility reads `L_s − M_ζ + [L, M] = 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{piii_rhs, PIIIParams, PainleveError, RadialSolution};
use crate::matalg3::CMat3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaxSample {
    pub s: f64,
    /// `[C₋₂, C₋₁, C₀]`
    pub l: [CMat3; 3],
    /// `[D₋₁, D₀, D₁]`
    pub m: [CMat3; 3],
}

impl LaxSample {
    pub fn l_at(&self, zeta: Complex64) -> CMat3 {
        let zi = zeta.inv();
        self.l[0] * (zi * zi) + self.l[1] * zi + self.l[2]
    }

    pub fn m_at(&self, zeta: Complex64) -> CMat3 {
        self.m[0] * zeta.inv() + self.m[1] + self.m[2] * zeta
    }

    pub fn dm_dzeta(&self, zeta: Complex64) -> CMat3 {
        let zi = zeta.inv();
        self.m[2] - self.m[0] * (zi * zi)
    }
}

/// Scalar building blocks shared by the pair and its `s`-derivative.
struct Blocks {
    /// `(sH)^{1/2}/√2`
    a: f64,
    /// `sH_s/(4H)`
    q: f64,
    /// `s/H`
    r: f64,
    /// `√2 (H/s)^{1/2}`
    m: f64,
    /// `√2 (s/H³)^{1/2}`
    t: f64,
}

fn blocks(s: f64, h: f64, hs: f64) -> Result<Blocks, PainleveError> {
    if !(s > 0.0) || !(h > 0.0) {
        return Err(PainleveError::NonpositiveH { s, h });
    }
    let sq2 = std::f64::consts::SQRT_2;
    Ok(Blocks {
        a: (s * h).sqrt() / sq2,
        q: s * hs / (4.0 * h),
        r: s / h,
        m: sq2 * (h / s).sqrt(),
        t: sq2 * (s / (h * h * h)).sqrt(),
    })
}

fn l_coeffs(a: f64, q: f64, r: f64) -> [CMat3; 3] {
    [
        CMat3::from_real([[0.0, 0.0, -a], [0.0; 3], [0.0; 3]]),
        CMat3::from_real([[-1.0 / 3.0, -a, 0.0], [-a, q - 1.0 / 12.0, r], [0.0, -r, 5.0 / 12.0 - q]]),
        CMat3::from_real([[0.0; 3], [0.0; 3], [-a, 0.0, 0.0]]),
    ]
}

/// Coefficients of the pair at `(s, H, H_s)`; needs `H > 0`.
pub fn lax_pair_at(s: f64, h: f64, hs: f64) -> Result<LaxSample, PainleveError> {
    let b = blocks(s, h, hs)?;
    let m = b.m;
    Ok(LaxSample {
        s,
        l: l_coeffs(b.a, b.q, b.r),
        m: [
            CMat3::from_real([[0.0, 0.0, m], [0.0; 3], [0.0; 3]]),
            CMat3::from_real([[0.0, -m, 0.0], [m, 0.0, m * b.t], [0.0, m * b.t, 0.0]]),
            CMat3::from_real([[0.0; 3], [0.0; 3], [-m, 0.0, 0.0]]),
        ],
    })
}

/// `∂_s` of the `L` coefficients by the chain rule, given `H_ss`.
fn l_coeffs_ds(s: f64, h: f64, hs: f64, hss: f64) -> Result<[CMat3; 3], PainleveError> {
    let b = blocks(s, h, hs)?;
    let da = (h + s * hs) / (4.0 * b.a);
    let dq = (hs + s * hss) / (4.0 * h) - s * hs * hs / (4.0 * h * h);
    let dr = 1.0 / h - s * hs / (h * h);
    // l_coeffs is affine in (a, q, r) with constant part l_coeffs(0, 0, 0)
    let base = l_coeffs(0.0, 0.0, 0.0);
    let lin = l_coeffs(da, dq, dr);
    Ok([lin[0] - base[0], lin[1] - base[1], lin[2] - base[2]])
}

/// `L_s − M_ζ + [L, M]` at one `ζ`, with `H_ss` supplied by the caller.
pub fn lax_residual_matrix(s: f64, h: f64, hs: f64, hss: f64, zeta: Complex64) -> Result<CMat3, PainleveError> {
    if zeta.norm() == 0.0 {
        return Err(PainleveError::BadInput("ζ = 0 is a pole of L".into()));
    }
    let lax = lax_pair_at(s, h, hs)?;
    let dl = l_coeffs_ds(s, h, hs, hss)?;
    let zi = zeta.inv();
    let l_s = dl[0] * (zi * zi) + dl[1] * zi + dl[2];
    Ok(l_s - lax.dm_dzeta(zeta) + lax.l_at(zeta).commutator(&lax.m_at(zeta)))
}

/// Pointwise compatibility with `H_ss` taken from the PIII right-hand side:
/// a transcription certificate for the displayed pair.
pub fn lax_identity_defect(s: f64, h: f64, hs: f64, zetas: &[Complex64]) -> Result<f64, PainleveError> {
    let hss = piii_rhs(s, h, hs, &PIIIParams::AFFINE_SPHERE)?;
    let mut worst = 0.0f64;
    for &z in zetas {
        worst = worst.max(lax_residual_matrix(s, h, hs, hss, z)?.norm_max());
    }
    Ok(worst)
}

const D7: [f64; 7] = [-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0];

/// Compatibility residual along a sampled trajectory. `H_ss` is measured
/// from the samples of `H_s` (7-point centred difference), so the residual
/// tests whether the data actually solve PIII; it is evaluated at every
/// node with three neighbours on each side.
pub fn isomonodromy_residual(rs: &RadialSolution, p: &PIIIParams, zetas: &[Complex64]) -> Result<f64, PainleveError> {
    if *p != PIIIParams::AFFINE_SPHERE {
        return Err(PainleveError::BadInput("the 3×3 pair is for (α, β, γ, δ) = (−8, 0, 0, −16)".into()));
    }
    rs.validate()?;
    let step = rs
        .uniform_step()
        .ok_or_else(|| PainleveError::BadInput("trajectory must be sampled on a uniform grid".into()))?;
    if rs.len() < 7 {
        return Err(PainleveError::BadInput("need at least 7 samples".into()));
    }
    if let Some(i) = rs.h.iter().position(|&h| !(h > 0.0)) {
        return Err(PainleveError::NonpositiveH { s: rs.s[i], h: rs.h[i] });
    }
    let mut worst = 0.0f64;
    for i in 3..rs.len() - 3 {
        let hss = (0..7).map(|k| D7[k] * rs.hs[i + k - 3]).sum::<f64>() / (60.0 * step);
        for &z in zetas {
            let r = lax_residual_matrix(rs.s[i], rs.h[i], rs.hs[i], hss, z)?;
            worst = worst.max(r.norm_max());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{re, I};

    fn zetas() -> Vec<Complex64> {
        vec![re(1.0), I, Complex64::new(2.0, -1.0)]
    }

    #[test]
    fn structure() {
        let lax = lax_pair_at(1.3, 0.7, -0.2).unwrap();
        // ζ²L → C₋₂ ≠ 0 as ζ → 0
        assert!(lax.l[0].norm_max() > 0.0);
        let d1 = lax.m[2];
        let expect = -std::f64::consts::SQRT_2 * (0.7f64 / 1.3).sqrt();
        for i in 0..3 {
            for j in 0..3 {
                let v = if (i, j) == (2, 0) { expect } else { 0.0 };
                assert_eq!(d1[(i, j)], re(v));
            }
        }
    }

    #[test]
    fn transcription_at_unit_data() {
        // s = H = 1, H_s = 0: L = −ζ⁻²·[[ζ/3, ζ/√2, 1/√2], [ζ/√2, ζ/12, −ζ],
        // [ζ²/√2, ζ, −5ζ/12]], M = √2·[[0, −1, 1/ζ], [1, 0, √2], [−ζ, √2, 0]].
        let lax = lax_pair_at(1.0, 1.0, 0.0).unwrap();
        let z = Complex64::new(0.4, 0.9);
        let r2 = std::f64::consts::FRAC_1_SQRT_2;
        let inner = [[z / 3.0, z * r2, re(r2)], [z * r2, z / 12.0, -z], [z * z * r2, z, z * (-5.0 / 12.0)]];
        let l = CMat3(inner) * (-(z * z).inv());
        assert!(lax.l_at(z).dist(&l) < 1e-15);
        let s2 = std::f64::consts::SQRT_2;
        let m = CMat3([[re(0.0), re(-1.0), z.inv()], [re(1.0), re(0.0), re(s2)], [-z, re(s2), re(0.0)]]) * s2;
        assert!(lax.m_at(z).dist(&m) < 1e-15);
        assert!((lax.m_at(re(1.0))[(1, 2)] - re(2.0)).norm() < 1e-15);
    }

    #[test]
    fn identity_holds_for_arbitrary_data() {
        for &(s, h, hs) in &[(1.0, 1.0, 0.0), (0.4, 2.5, -1.1), (3.0, 0.2, 0.7)] {
            assert!(lax_identity_defect(s, h, hs, &zetas()).unwrap() < 1e-10);
        }
    }

    #[test]
    fn wrong_second_derivative_is_seen() {
        let hss = piii_rhs(1.0, 1.0, 0.0, &PIIIParams::AFFINE_SPHERE).unwrap();
        let r = lax_residual_matrix(1.0, 1.0, 0.0, hss + 0.1, re(1.0)).unwrap();
        assert!(r.norm_max() > 1e-3);
    }

    #[test]
    fn chain_rule_matches_finite_differences() {
        let (h, hs, hss) = (|s: f64| 1.0 + s * s, |s: f64| 2.0 * s, 2.0);
        let s = 0.8;
        let d = l_coeffs_ds(s, h(s), hs(s), hss).unwrap();
        let e = 1e-5;
        let (p, m) =
            (lax_pair_at(s + e, h(s + e), hs(s + e)).unwrap(), lax_pair_at(s - e, h(s - e), hs(s - e)).unwrap());
        for k in 0..3 {
            let fd = (p.l[k] - m.l[k]) * (1.0 / (2.0 * e));
            assert!(fd.dist(&d[k]) < 1e-8);
        }
    }

    #[test]
    fn rejects_nonpositive_h() {
        assert!(matches!(lax_pair_at(1.0, -1.0, 0.0), Err(PainleveError::NonpositiveH { .. })));
    }
}
