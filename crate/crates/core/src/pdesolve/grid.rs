use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::PdeError;

/// How grid coordinates `(x, y)` map to the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Chart {
    /// `z = x + i y`.
    #[default]
    Cartesian,
    /// `z = exp(x + i y)`: `x = log|z|`, `y = arg z`, periodic in `y`.
    LogPolar,
}

/// Shape and placement of a rectangular grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridShape {
    pub nx: usize,
    pub ny: usize,
    pub x0: f64,
    pub y0: f64,
    pub hx: f64,
    pub hy: f64,
    #[serde(default)]
    pub chart: Chart,
}

impl GridShape {
    pub fn new(nx: usize, ny: usize, x0: f64, y0: f64, hx: f64, hy: f64) -> Result<Self, PdeError> {
        let s = GridShape { nx, ny, x0, y0, hx, hy, chart: Chart::Cartesian };
        s.validate()?;
        Ok(s)
    }

    /// `nx × ny` nodes covering `[xa, xb] × [ya, yb]` including both edges.
    pub fn rect(nx: usize, ny: usize, xa: f64, xb: f64, ya: f64, yb: f64) -> Result<Self, PdeError> {
        if nx < 2 || ny < 2 {
            return Err(PdeError::BadGrid(format!("need at least 3×3 nodes, got {nx}×{ny}")));
        }
        Self::new(nx, ny, xa, ya, (xb - xa) / (nx - 1) as f64, (yb - ya) / (ny - 1) as f64)
    }

    /// Annulus `r_in ≤ |z| ≤ r_out` in log-polar coordinates with `nr` radial
    /// and `ntheta` angular nodes (the angle is periodic; no node is repeated).
    pub fn annulus(nr: usize, ntheta: usize, r_in: f64, r_out: f64) -> Result<Self, PdeError> {
        if !(r_in > 0.0 && r_out > r_in) {
            return Err(PdeError::BadGrid(format!("annulus radii {r_in}, {r_out}")));
        }
        if nr < 3 {
            return Err(PdeError::BadGrid(format!("nr = {nr} < 3")));
        }
        let s = GridShape {
            nx: nr,
            ny: ntheta,
            x0: r_in.ln(),
            y0: 0.0,
            hx: (r_out / r_in).ln() / (nr - 1) as f64,
            hy: std::f64::consts::TAU / ntheta as f64,
            chart: Chart::LogPolar,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), PdeError> {
        if self.nx < 3 || self.ny < 3 {
            return Err(PdeError::BadGrid(format!("need at least 3×3 nodes, got {}×{}", self.nx, self.ny)));
        }
        if !(self.hx > 0.0 && self.hy > 0.0 && self.hx.is_finite() && self.hy.is_finite()) {
            return Err(PdeError::BadGrid(format!("spacings {} {}", self.hx, self.hy)));
        }
        if !(self.x0.is_finite() && self.y0.is_finite()) {
            return Err(PdeError::BadGrid("non-finite origin".into()));
        }
        if self.chart == Chart::LogPolar {
            let period = self.hy * self.ny as f64;
            if (period - std::f64::consts::TAU).abs() > 1e-9 {
                return Err(PdeError::BadGrid(format!("log-polar grid must wrap exactly once: ny*hy = {period}")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i + self.nx * j
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.hx
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.hy
    }

    pub fn periodic_y(&self) -> bool {
        self.chart == Chart::LogPolar
    }

    /// Point of the complex plane at node (i, j).
    pub fn z(&self, i: usize, j: usize) -> Complex64 {
        let (x, y) = (self.x(i), self.y(j));
        match self.chart {
            Chart::Cartesian => Complex64::new(x, y),
            Chart::LogPolar => Complex64::from_polar(x.exp(), y),
        }
    }

    /// Dirichlet nodes: every edge for Cartesian grids, the two radial
    /// circles for log-polar ones.
    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        let xb = i == 0 || i + 1 == self.nx;
        match self.chart {
            Chart::Cartesian => xb || j == 0 || j + 1 == self.ny,
            Chart::LogPolar => xb,
        }
    }

    pub fn interior(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.ny).flat_map(move |j| (0..self.nx).map(move |i| (i, j))).filter(move |&(i, j)| !self.is_boundary(i, j))
    }

    /// Same placement with spacing halved (node count `2n − 1` on bounded
    /// directions, `2n` on the periodic one).
    pub fn refined(&self) -> Self {
        let mut s = *self;
        s.nx = 2 * self.nx - 1;
        s.hx = self.hx / 2.0;
        if self.periodic_y() {
            s.ny = 2 * self.ny;
        } else {
            s.ny = 2 * self.ny - 1;
        }
        s.hy = self.hy / 2.0;
        s
    }

    fn wrap_j(&self, j: isize) -> usize {
        let n = self.ny as isize;
        (((j % n) + n) % n) as usize
    }
}

/// Samples of a scalar on a [`GridShape`], stored x-fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarGrid<T = f64> {
    pub shape: GridShape,
    pub values: Vec<T>,
}

impl<T: Copy> ScalarGrid<T> {
    pub fn new(shape: GridShape, values: Vec<T>) -> Result<Self, PdeError> {
        shape.validate()?;
        if values.len() != shape.len() {
            return Err(PdeError::GridMismatch(format!(
                "{} values for a {}×{} grid",
                values.len(),
                shape.nx,
                shape.ny
            )));
        }
        Ok(ScalarGrid { shape, values })
    }

    pub fn filled(shape: GridShape, v: T) -> Self {
        ScalarGrid { shape, values: vec![v; shape.len()] }
    }

    /// Samples `f(x, y)` at every node (grid coordinates, not `z`).
    pub fn from_xy(shape: GridShape, mut f: impl FnMut(f64, f64) -> T) -> Self {
        let mut values = Vec::with_capacity(shape.len());
        for j in 0..shape.ny {
            for i in 0..shape.nx {
                values.push(f(shape.x(i), shape.y(j)));
            }
        }
        ScalarGrid { shape, values }
    }

    /// Samples `f(z)` at every node.
    pub fn from_z(shape: GridShape, mut f: impl FnMut(Complex64) -> T) -> Self {
        let mut values = Vec::with_capacity(shape.len());
        for j in 0..shape.ny {
            for i in 0..shape.nx {
                values.push(f(shape.z(i, j)));
            }
        }
        ScalarGrid { shape, values }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        self.values[self.shape.index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let k = self.shape.index(i, j);
        self.values[k] = v;
    }

    pub fn map<U>(&self, f: impl Fn(T) -> U) -> ScalarGrid<U> {
        ScalarGrid { shape: self.shape, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn same_shape<U>(&self, other: &ScalarGrid<U>) -> Result<(), PdeError> {
        if self.shape != other.shape {
            return Err(PdeError::GridMismatch(format!(
                "{}×{} vs {}×{}",
                self.shape.nx, self.shape.ny, other.shape.nx, other.shape.ny
            )));
        }
        Ok(())
    }

    /// Row `j` (fixed y) as a vector.
    pub fn row(&self, j: usize) -> Vec<T> {
        (0..self.shape.nx).map(|i| self.at(i, j)).collect()
    }
}

impl ScalarGrid<f64> {
    /// Sup norm over interior nodes.
    pub fn max_abs_interior(&self) -> f64 {
        self.shape.interior().map(|(i, j)| self.at(i, j).abs()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Sup of `|self − other|` over all nodes.
    pub fn max_diff(&self, other: &Self) -> Result<f64, PdeError> {
        self.same_shape(other)?;
        Ok(self.values.iter().zip(&other.values).fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Value at `(i, j + dj)` honouring periodicity in `y`. Only valid for
    /// in-range `j + dj` on non-periodic grids.
    #[inline]
    fn at_off(&self, i: usize, j: usize, dj: isize) -> f64 {
        let jj = if self.shape.periodic_y() { self.shape.wrap_j(j as isize + dj) } else { (j as isize + dj) as usize };
        self.at(i, jj)
    }

    /// Second-order first derivatives in grid coordinates; one-sided
    /// three-point formulas on non-periodic edges.
    pub fn d_dx(&self, i: usize, j: usize) -> f64 {
        let h = self.shape.hx;
        let n = self.shape.nx;
        if i == 0 {
            (-3.0 * self.at(0, j) + 4.0 * self.at(1, j) - self.at(2, j)) / (2.0 * h)
        } else if i + 1 == n {
            (3.0 * self.at(n - 1, j) - 4.0 * self.at(n - 2, j) + self.at(n - 3, j)) / (2.0 * h)
        } else {
            (self.at(i + 1, j) - self.at(i - 1, j)) / (2.0 * h)
        }
    }

    pub fn d_dy(&self, i: usize, j: usize) -> f64 {
        let h = self.shape.hy;
        let n = self.shape.ny;
        if self.shape.periodic_y() {
            return (self.at_off(i, j, 1) - self.at_off(i, j, -1)) / (2.0 * h);
        }
        if j == 0 {
            (-3.0 * self.at(i, 0) + 4.0 * self.at(i, 1) - self.at(i, 2)) / (2.0 * h)
        } else if j + 1 == n {
            (3.0 * self.at(i, n - 1) - 4.0 * self.at(i, n - 2) + self.at(i, n - 3)) / (2.0 * h)
        } else {
            (self.at(i, j + 1) - self.at(i, j - 1)) / (2.0 * h)
        }
    }

    /// Centered mixed derivative `∂_x∂_y` at an interior node.
    pub fn d_dxdy(&self, i: usize, j: usize) -> f64 {
        let (hx, hy) = (self.shape.hx, self.shape.hy);
        (self.at_off(i + 1, j, 1) - self.at_off(i + 1, j, -1) - self.at_off(i - 1, j, 1) + self.at_off(i - 1, j, -1))
            / (4.0 * hx * hy)
    }

    /// 5-point `∂_x² + ∂_y²` in grid coordinates at an interior node.
    pub fn laplacian_xy(&self, i: usize, j: usize) -> f64 {
        let (hx, hy) = (self.shape.hx, self.shape.hy);
        let c = self.at(i, j);
        (self.at(i + 1, j) - 2.0 * c + self.at(i - 1, j)) / (hx * hx)
            + (self.at_off(i, j, 1) - 2.0 * c + self.at_off(i, j, -1)) / (hy * hy)
    }

    /// `∂_z∂_z̄` at an interior node, in whichever chart the grid uses.
    pub fn d_zzbar(&self, i: usize, j: usize) -> f64 {
        let lap = 0.25 * self.laplacian_xy(i, j);
        match self.shape.chart {
            Chart::Cartesian => lap,
            Chart::LogPolar => lap * (-2.0 * self.shape.x(i)).exp(),
        }
    }

    /// `∂_z` of a real field: `½(∂_x − i∂_y)` or `(1/2z)(∂_t − i∂_θ)`.
    pub fn d_z(&self, i: usize, j: usize) -> Complex64 {
        let w = Complex64::new(self.d_dx(i, j), -self.d_dy(i, j)) * 0.5;
        match self.shape.chart {
            Chart::Cartesian => w,
            Chart::LogPolar => w / self.shape.z(i, j),
        }
    }

    /// `∂_z̄ = conj(∂_z)` for a real field.
    pub fn d_zbar(&self, i: usize, j: usize) -> Complex64 {
        self.d_z(i, j).conj()
    }

    /// Angular average at each radial index (log-polar grids) or column
    /// average (Cartesian).
    pub fn column_means(&self) -> Vec<f64> {
        (0..self.shape.nx)
            .map(|i| (0..self.shape.ny).map(|j| self.at(i, j)).sum::<f64>() / self.shape.ny as f64)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_of_quadratic_are_exact() {
        let s = GridShape::rect(9, 7, -1.0, 1.0, 0.0, 2.0).unwrap();
        let g = ScalarGrid::from_xy(s, |x, y| x * x + 3.0 * x * y - y * y);
        for j in 0..s.ny {
            for i in 0..s.nx {
                let (x, y) = (s.x(i), s.y(j));
                assert!((g.d_dx(i, j) - (2.0 * x + 3.0 * y)).abs() < 1e-12);
                assert!((g.d_dy(i, j) - (3.0 * x - 2.0 * y)).abs() < 1e-12);
            }
        }
        for (i, j) in s.interior() {
            assert!((g.laplacian_xy(i, j) - 0.0).abs() < 1e-10);
            assert!((g.d_dxdy(i, j) - 3.0).abs() < 1e-10);
        }
    }

    #[test]
    fn log_polar_dz_of_modulus_squared() {
        // |z|² = e^{2t}; ∂_z |z|² = z̄.
        let s = GridShape::annulus(41, 64, 0.5, 2.0).unwrap();
        let g = ScalarGrid::from_z(s, |z| z.norm_sqr());
        let (i, j) = (20, 11);
        let z = s.z(i, j);
        assert!((g.d_z(i, j) - z.conj()).norm() < 1e-3);
        // ∂_z∂_z̄ |z|² = 1
        assert!((g.d_zzbar(i, j) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn interior_excludes_edges() {
        let s = GridShape::rect(4, 5, 0.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(s.interior().count(), 2 * 3);
        let a = GridShape::annulus(4, 8, 1.0, 2.0).unwrap();
        assert_eq!(a.interior().count(), 2 * 8);
    }

    #[test]
    fn bad_shapes_rejected() {
        assert!(GridShape::new(2, 5, 0.0, 0.0, 0.1, 0.1).is_err());
        assert!(GridShape::new(5, 5, 0.0, 0.0, -0.1, 0.1).is_err());
        let s = GridShape::rect(3, 3, 0.0, 1.0, 0.0, 1.0).unwrap();
        assert!(ScalarGrid::new(s, vec![0.0; 8]).is_err());
    }
}
