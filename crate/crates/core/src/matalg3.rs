//! 3×3 complex matrices, the `su(2,1)` involution and the normal form of a
//! pair of square-zero Higgs fields.
//!
//! Matrix units are written `E_ij` with 1-based indices throughout, so
//! `CMat3::unit(1, 3)` has a single 1 in the top-right corner.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default relative tolerance for the nilpotency and trace tests.
pub const DEFAULT_TOL: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatError {
    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("trace(PQ) = {omega} is below tolerance; the pair cannot be normalized")]
    SingularPair { omega: Complex64 },
    #[error("matrix is not square-zero: |M^2| = {residual:e} exceeds tolerance")]
    BadNilpotent { residual: f64 },
}

/// A 3×3 complex matrix.
#[derive(Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CMat3(pub [[Complex64; 3]; 3]);

impl fmt::Debug for CMat3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMat3[")?;
        for row in &self.0 {
            writeln!(f, "  {:.6} {:.6} {:.6}", row[0], row[1], row[2])?;
        }
        write!(f, "]")
    }
}

impl CMat3 {
    pub const fn zeros() -> Self {
        CMat3([[ZERO; 3]; 3])
    }

    pub fn identity() -> Self {
        Self::diag([ONE, ONE, ONE])
    }

    /// Checked constructor; rejects NaN and infinite entries.
    pub fn try_from_rows(rows: [[Complex64; 3]; 3]) -> Result<Self, MatError> {
        for (row, r) in rows.iter().enumerate() {
            for (col, v) in r.iter().enumerate() {
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(MatError::NonFinite { row: row + 1, col: col + 1 });
                }
            }
        }
        Ok(CMat3(rows))
    }

    pub fn from_real(rows: [[f64; 3]; 3]) -> Self {
        let mut m = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = Complex64::new(rows[i][j], 0.0);
            }
        }
        m
    }

    pub fn diag(d: [Complex64; 3]) -> Self {
        let mut m = Self::zeros();
        for (i, v) in d.into_iter().enumerate() {
            m.0[i][i] = v;
        }
        m
    }

    pub fn real_diag(d: [f64; 3]) -> Self {
        Self::diag(d.map(|x| Complex64::new(x, 0.0)))
    }

    /// Matrix unit `E_ij` (1-based).
    pub fn unit(i: usize, j: usize) -> Self {
        assert!((1..=3).contains(&i) && (1..=3).contains(&j), "E_{i}{j} out of range");
        let mut m = Self::zeros();
        m.0[i - 1][j - 1] = ONE;
        m
    }

    /// `c · E_ij` (1-based).
    pub fn scaled_unit(i: usize, j: usize, c: Complex64) -> Self {
        Self::unit(i, j) * c
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[j][i];
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        CMat3(self.0.map(|r| r.map(|v| v.conj())))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    pub fn det(&self) -> Complex64 {
        let a = &self.0;
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    }

    /// Inverse by the adjugate; `None` when the determinant vanishes exactly
    /// or the result is not finite.
    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d == ZERO {
            return None;
        }
        let a = &self.0;
        let mut adj = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
                let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
                adj.0[i][j] = a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0];
            }
        }
        let inv = adj * (ONE / d);
        inv.is_finite().then_some(inv)
    }

    /// Max absolute entry.
    pub fn norm_max(&self) -> f64 {
        self.0.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    pub fn powi(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(), |acc, _| acc * *self)
    }

    pub fn column(&self, j: usize) -> [Complex64; 3] {
        [self.0[0][j], self.0[1][j], self.0[2][j]]
    }

    pub fn row(&self, i: usize) -> [Complex64; 3] {
        self.0[i]
    }

    pub fn from_columns(cols: [[Complex64; 3]; 3]) -> Self {
        let mut m = Self::zeros();
        for (j, c) in cols.iter().enumerate() {
            for i in 0..3 {
                m.0[i][j] = c[i];
            }
        }
        m
    }

    pub fn apply(&self, v: &[Complex64; 3]) -> [Complex64; 3] {
        let mut out = [ZERO; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.0[i][0] * v[0] + self.0[i][1] * v[1] + self.0[i][2] * v[2];
        }
        out
    }

    /// `g⁻¹ m g`.
    pub fn conjugate_by(&self, g: &Self, g_inv: &Self) -> Self {
        *g_inv * *self * *g
    }

    /// Max entrywise distance.
    pub fn dist(&self, other: &Self) -> f64 {
        (*self - *other).norm_max()
    }
}

impl Index<(usize, usize)> for CMat3 {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for CMat3 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.0[i][j]
    }
}

impl Add for CMat3 {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl AddAssign for CMat3 {
    fn add_assign(&mut self, rhs: Self) {
        for i in 0..3 {
            for j in 0..3 {
                self.0[i][j] += rhs.0[i][j];
            }
        }
    }
}

impl Sub for CMat3 {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self -= rhs;
        self
    }
}

impl SubAssign for CMat3 {
    fn sub_assign(&mut self, rhs: Self) {
        for i in 0..3 {
            for j in 0..3 {
                self.0[i][j] -= rhs.0[i][j];
            }
        }
    }
}

impl Neg for CMat3 {
    type Output = Self;
    fn neg(self) -> Self {
        CMat3(self.0.map(|r| r.map(|v| -v)))
    }
}

impl Mul for CMat3 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[i][0] * rhs.0[0][j] + self.0[i][1] * rhs.0[1][j] + self.0[i][2] * rhs.0[2][j];
            }
        }
        m
    }
}

impl Mul<Complex64> for CMat3 {
    type Output = Self;
    fn mul(self, c: Complex64) -> Self {
        CMat3(self.0.map(|r| r.map(|v| v * c)))
    }
}

impl Mul<f64> for CMat3 {
    type Output = Self;
    fn mul(self, c: f64) -> Self {
        CMat3(self.0.map(|r| r.map(|v| v * c)))
    }
}

impl std::iter::Sum for CMat3 {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zeros(), |a, b| a + b)
    }
}

/// The signature matrix `η = diag(1, 1, −1)` of `su(2,1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Eta;

impl Eta {
    pub fn matrix(&self) -> CMat3 {
        CMat3::real_diag([1.0, 1.0, -1.0])
    }

    /// η is an involution, so this is the same matrix.
    pub fn inverse(&self) -> CMat3 {
        self.matrix()
    }

    /// Left or right multiplication by η flips the sign of the third row or
    /// column; `η m η` flips the four entries off the 2×2 block.
    pub fn sandwich(&self, m: &CMat3) -> CMat3 {
        let mut out = *m;
        for k in 0..2 {
            out.0[k][2] = -out.0[k][2];
            out.0[2][k] = -out.0[2][k];
        }
        out
    }
}

/// `m* = −η⁻¹ m̄ᵗ η`.
pub fn star(m: &CMat3) -> CMat3 {
    -Eta.sandwich(&m.adjoint())
}

/// True iff `m` is traceless and fixed by [`star`], i.e. `m ∈ su(2,1)`.
pub fn in_su21(m: &CMat3, tol: f64) -> bool {
    let scale = m.norm_max().max(1.0);
    m.trace().norm() <= tol * scale && star(m).dist(m) <= tol * scale
}

/// True iff `m ≠ 0` and `m² = 0`, i.e. the minimal polynomial is `t²`.
pub fn min_poly_is_t2(m: &CMat3, tol: f64) -> bool {
    let n = m.norm_max();
    n > tol && (*m * *m).norm_max() <= tol * n * n
}

/// Result of [`normalize_higgs_pair`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HiggsNormalForm {
    /// Unimodular change of basis with columns `(v, u, w)`.
    pub g: CMat3,
    /// `Tr(PQ)`, the only invariant of the pair.
    pub omega: Complex64,
}

/// Finds a unimodular `g` with `g⁻¹Pg = E13` and `g⁻¹Qg = ω E31`.
///
/// Builds the Jordan basis `(v, u, w)` of `P` (with `P w = v`, `P v = P u = 0`),
/// shifts `u, w` by multiples of `v` into the kernel of `Q`, absorbs the
/// remaining `u` component of `Q v` into `w`, and finally rescales `u` so that
/// `det g = 1`. The pivot `w` is the standard basis vector whose image under
/// `P` is largest (lowest index on ties).
pub fn normalize_higgs_pair(p: &CMat3, q: &CMat3, tol: f64) -> Result<HiggsNormalForm, MatError> {
    let (np, nq) = (p.norm_max(), q.norm_max());
    for m in [p, q] {
        let n = m.norm_max();
        let residual = (*m * *m).norm_max();
        if residual > tol * (n * n).max(f64::MIN_POSITIVE) {
            return Err(MatError::BadNilpotent { residual });
        }
    }
    let omega = (*p * *q).trace();
    if omega.norm() <= tol * (np * nq).max(1.0) {
        return Err(MatError::SingularPair { omega });
    }

    // Pivot column of P.
    let mut pivot = 0;
    let mut best = -1.0;
    for j in 0..3 {
        let c = vec_norm(&p.column(j));
        if c > best {
            best = c;
            pivot = j;
        }
    }
    let mut w = [ZERO; 3];
    w[pivot] = ONE;
    let v = p.apply(&w);

    // Kernel of P: rank one, so ker P = {x : r·x = 0} for its largest row r.
    let r = (0..3).map(|i| p.row(i)).max_by(|a, b| vec_norm(a).total_cmp(&vec_norm(b))).expect("three rows");
    let candidates = [[r[1], -r[0], ZERO], [r[2], ZERO, -r[0]], [ZERO, r[2], -r[1]]];
    let vv = hdot(&v, &v);
    let u = candidates
        .iter()
        .map(|k| {
            let c = hdot(&v, k) / vv;
            sub3(k, &scale3(&v, c))
        })
        .max_by(|a, b| vec_norm(a).total_cmp(&vec_norm(b)))
        .expect("three candidates");

    // Move u and w into ker Q.
    let qv = q.apply(&v);
    let qq = hdot(&qv, &qv);
    let a = hdot(&qv, &q.apply(&u)) / qq;
    let b = hdot(&qv, &q.apply(&w)) / qq;
    let u = sub3(&u, &scale3(&v, a));
    let w = sub3(&w, &scale3(&v, b));

    // Q v = c u + ω' w; solve the 2-column least-squares problem.
    let (c, om) = solve_two_columns(&u, &w, &qv);
    let w = add3(&w, &scale3(&u, c / om));

    let g = CMat3::from_columns([v, u, w]);
    let d = g.det();
    let g = CMat3::from_columns([v, scale3(&u, ONE / d), w]);
    Ok(HiggsNormalForm { g, omega })
}

fn hdot(a: &[Complex64; 3], b: &[Complex64; 3]) -> Complex64 {
    a[0].conj() * b[0] + a[1].conj() * b[1] + a[2].conj() * b[2]
}

fn vec_norm(a: &[Complex64; 3]) -> f64 {
    hdot(a, a).re.sqrt()
}

fn scale3(a: &[Complex64; 3], c: Complex64) -> [Complex64; 3] {
    a.map(|x| x * c)
}

fn sub3(a: &[Complex64; 3], b: &[Complex64; 3]) -> [Complex64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn add3(a: &[Complex64; 3], b: &[Complex64; 3]) -> [Complex64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// Least-squares coefficients `(c, d)` with `y ≈ c x1 + d x2`.
fn solve_two_columns(x1: &[Complex64; 3], x2: &[Complex64; 3], y: &[Complex64; 3]) -> (Complex64, Complex64) {
    let g11 = hdot(x1, x1);
    let g12 = hdot(x1, x2);
    let g22 = hdot(x2, x2);
    let r1 = hdot(x1, y);
    let r2 = hdot(x2, y);
    let det = g11 * g22 - g12 * g12.conj();
    let c = (g22 * r1 - g12 * r2) / det;
    let d = (g11 * r2 - g12.conj() * r1) / det;
    (c, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn star_of_zero_and_e13() {
        assert_eq!(star(&CMat3::zeros()), CMat3::zeros());
        // −η Ē13ᵗ η = −η E31 η = −(−E31) = E31
        assert_eq!(star(&CMat3::unit(1, 3)), CMat3::unit(3, 1));
    }

    #[test]
    fn star_matches_definition() {
        let m = CMat3([
            [c(1.0, 2.0), c(0.5, -1.0), c(3.0, 0.0)],
            [c(0.0, 1.0), c(-2.0, 0.3), c(1.0, 1.0)],
            [c(0.7, 0.0), c(0.0, -4.0), c(1.0, -1.0)],
        ]);
        let eta = Eta.matrix();
        let direct = -(Eta.inverse() * m.adjoint() * eta);
        assert!(star(&m).dist(&direct) < 1e-15);
        assert!(star(&star(&m)).dist(&m) < 1e-15);
    }

    #[test]
    fn eta_is_involution() {
        assert_eq!(Eta.matrix() * Eta.inverse(), CMat3::identity());
    }

    #[test]
    fn su21_membership() {
        let d = CMat3::diag([c(0.0, 1.0), c(0.0, -2.0), c(0.0, 1.0)]);
        assert!(in_su21(&d, 1e-12));
        assert!(!in_su21(&CMat3::identity(), 1e-12));
        assert!(in_su21(&(CMat3::unit(1, 3) + CMat3::unit(3, 1)), 1e-12));
        // E12 + E21 is hermitian, not anti-hermitian in the 2×2 block.
        assert!(!in_su21(&(CMat3::unit(1, 2) + CMat3::unit(2, 1)), 1e-12));
    }

    #[test]
    fn minimal_polynomial() {
        assert!(min_poly_is_t2(&CMat3::unit(1, 3), 1e-12));
        assert!(!min_poly_is_t2(&CMat3::zeros(), 1e-12));
        assert!(!min_poly_is_t2(&(CMat3::unit(1, 2) + CMat3::unit(2, 3)), 1e-12));
    }

    #[test]
    fn inverse_and_det() {
        let m = CMat3::from_real([[2.0, 1.0, 0.0], [0.0, 1.0, 3.0], [1.0, 0.0, 1.0]]);
        let inv = m.inverse().unwrap();
        assert!((m * inv).dist(&CMat3::identity()) < 1e-14);
        assert!((m.det() - c(5.0, 0.0)).norm() < 1e-14);
        assert!(CMat3::unit(1, 3).inverse().is_none());
    }

    #[test]
    fn non_finite_rejected() {
        let mut rows = [[ZERO; 3]; 3];
        rows[1][2] = c(f64::NAN, 0.0);
        assert_eq!(CMat3::try_from_rows(rows), Err(MatError::NonFinite { row: 2, col: 3 }));
    }

    #[test]
    fn canonical_pair_is_fixed() {
        let e = c(0.3, -1.7);
        let nf = normalize_higgs_pair(&CMat3::unit(1, 3), &(CMat3::unit(3, 1) * e), 1e-9).unwrap();
        let gi = nf.g.inverse().unwrap();
        assert!(CMat3::unit(1, 3).conjugate_by(&nf.g, &gi).dist(&CMat3::unit(1, 3)) < 1e-14);
        assert!((nf.omega - e).norm() < 1e-15);
        assert!((nf.g.det() - ONE).norm() < 1e-14);
    }

    #[test]
    fn singular_and_non_nilpotent_pairs() {
        assert!(matches!(
            normalize_higgs_pair(&CMat3::unit(1, 3), &CMat3::unit(1, 2), 1e-9),
            Err(MatError::SingularPair { .. })
        ));
        let p = CMat3::unit(1, 2) + CMat3::unit(2, 3);
        assert!(matches!(normalize_higgs_pair(&p, &CMat3::unit(3, 1), 1e-9), Err(MatError::BadNilpotent { .. })));
    }

    #[test]
    fn conjugated_pair_round_trip() {
        let g0 = CMat3([
            [c(1.0, 0.2), c(0.3, 0.0), c(-0.5, 1.0)],
            [c(0.0, -0.4), c(2.0, 0.1), c(0.7, 0.0)],
            [c(0.6, 0.6), c(-1.0, 0.0), c(1.5, -0.3)],
        ]);
        let g0 = g0 * (ONE / g0.det().powf(1.0 / 3.0));
        let gi0 = g0.inverse().unwrap();
        let p = CMat3::unit(1, 3).conjugate_by(&g0, &gi0);
        let q = CMat3::unit(3, 1).conjugate_by(&g0, &gi0);
        let nf = normalize_higgs_pair(&p, &q, 1e-9).unwrap();
        let gi = nf.g.inverse().unwrap();
        assert!(p.conjugate_by(&nf.g, &gi).dist(&CMat3::unit(1, 3)) < 1e-10);
        assert!(q.conjugate_by(&nf.g, &gi).dist(&CMat3::unit(3, 1)) < 1e-10);
        assert!((nf.omega - ONE).norm() < 1e-12);
        assert!((nf.g.det() - ONE).norm() < 1e-12);
    }
}
