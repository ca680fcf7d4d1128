//! Banded LU with partial pivoting.
//!
//! The Newton systems of the 5-point Laplacian have half-bandwidth equal to
//! the short grid dimension, so a dense band solver is both simple and fast
//! enough at the grid sizes used here. Storage follows the LAPACK `gbtrf`
//! layout: `kl` extra rows on top hold fill-in from row swaps.

#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    /// Row stride `2*kl + ku + 1`; entry (i, j) lives at `ab[(kl + ku + i - j) + j*ld]`.
    ab: Vec<f64>,
    ld: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("banded matrix is singular at pivot {0}")]
pub struct SingularBand(pub usize);

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ld = 2 * kl + ku + 1;
        BandMatrix { n, kl, ku, ab: vec![0.0; ld * n], ld }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        (self.kl + self.ku + i - j) + j * self.ld
    }

    /// Adds `v` to entry (i, j). Panics outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(j <= i + self.ku && i <= j + self.kl, "({i},{j}) outside band kl={} ku={}", self.kl, self.ku);
        let k = self.idx(i, j);
        self.ab[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j > i + self.ku || i > j + self.kl {
            return 0.0;
        }
        self.ab[self.idx(i, j)]
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for (i, yi) in y.iter_mut().enumerate() {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n - 1);
            for (j, xj) in x.iter().enumerate().take(hi + 1).skip(lo) {
                *yi += self.get(i, j) * xj;
            }
        }
        y
    }

    /// Factorizes in place and solves `A x = b`, overwriting `b`.
    pub fn solve(mut self, b: &mut [f64]) -> Result<(), SingularBand> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        assert_eq!(b.len(), n);
        let kv = kl + ku;
        let mut piv = vec![0usize; n];
        for j in 0..n {
            let last = (j + kl).min(n - 1);
            // pivot search in column j
            let mut p = j;
            let mut best = self.ab[self.idx(j, j)].abs();
            for i in j + 1..=last {
                let v = self.ab[self.idx(i, j)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(SingularBand(j));
            }
            piv[j] = p;
            let jmax = (j + kv).min(n - 1);
            if p != j {
                for c in j..=jmax {
                    let (a, bb) = (self.idx(j, c), self.idx(p, c));
                    self.ab.swap(a, bb);
                }
            }
            let d = self.ab[self.idx(j, j)];
            for i in j + 1..=last {
                let k = self.idx(i, j);
                let l = self.ab[k] / d;
                self.ab[k] = l;
                if l != 0.0 {
                    for c in j + 1..=jmax {
                        let u = self.ab[self.idx(j, c)];
                        let t = self.idx(i, c);
                        self.ab[t] -= l * u;
                    }
                }
            }
        }
        // forward: apply row swaps and L
        for j in 0..n {
            let p = piv[j];
            if p != j {
                b.swap(j, p);
            }
            let bj = b[j];
            for (i, bi) in b.iter_mut().enumerate().take((j + kl).min(n - 1) + 1).skip(j + 1) {
                *bi -= self.ab[self.idx(i, j)] * bj;
            }
        }
        // backward: U
        for j in (0..n).rev() {
            b[j] /= self.ab[self.idx(j, j)];
            let bj = b[j];
            let lo = j.saturating_sub(kv);
            for (i, bi) in b.iter_mut().enumerate().take(j).skip(lo) {
                *bi -= self.ab[self.idx(i, j)] * bj;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_band_system_matches_dense_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (n, kl, ku) = (40, 5, 3);
        let mut a = BandMatrix::zeros(n, kl, ku);
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                a.add(i, j, rng.gen_range(-1.0..1.0));
            }
        }
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut b = a.matvec(&x);
        a.solve(&mut b).unwrap();
        let err = x.iter().zip(&b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        assert!(err < 1e-10, "err = {err}");
    }

    #[test]
    fn pivoting_needed() {
        // [[0,1],[1,0]] has a zero leading pivot.
        let mut a = BandMatrix::zeros(2, 1, 1);
        a.add(0, 1, 1.0);
        a.add(1, 0, 1.0);
        let mut b = vec![2.0, 3.0];
        a.solve(&mut b).unwrap();
        assert_eq!(b, vec![3.0, 2.0]);
    }

    #[test]
    fn singular_detected() {
        let a = BandMatrix::zeros(3, 1, 1);
        let mut b = vec![1.0; 3];
        assert_eq!(a.solve(&mut b), Err(SingularBand(0)));
    }
}
