//! Banded matrices and LU factorization with partial pivoting.

use crate::error::{Error, Result};

/// Square matrix with `kl` sub-diagonals and `ku` super-diagonals.
///
/// Storage leaves room for the `kl` extra super-diagonals created by row
/// interchanges during factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self { n, kl, ku, width, data: vec![0.0; n * width] }
    }

    pub fn identity(n: usize, kl: usize, ku: usize) -> Self {
        let mut m = Self::zeros(n, kl, ku);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    fn in_storage(&self, i: usize, j: usize) -> bool {
        j + self.kl >= i && j <= i + self.kl + self.ku
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i < self.n && j < self.n && self.in_storage(i, j) {
            self.data[self.idx(i, j)]
        } else {
            0.0
        }
    }

    /// Set an entry inside the declared band. Panics outside it.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(
            i < self.n && j < self.n && j + self.kl >= i && j <= i + self.ku,
            "entry ({i}, {j}) outside band"
        );
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    /// Replace row `i` by the unit row (Dirichlet pinning).
    pub fn pin_row(&mut self, i: usize) {
        let lo = i.saturating_sub(self.kl);
        let hi = (i + self.ku).min(self.n - 1);
        for j in lo..=hi {
            self.set(i, j, if i == j { 1.0 } else { 0.0 });
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// Infinity norm.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j).abs()).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// LU factorization with partial pivoting.
    pub fn factor(&self) -> Result<BandedLu> {
        let mut a = self.clone();
        let n = a.n;
        let (kl, ku) = (a.kl, a.ku);
        let scale = self.norm_inf().max(f64::MIN_POSITIVE);
        let mut perm = vec![0usize; n];
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = a.get(k, k).abs();
            for i in k + 1..=last_row {
                let v = a.get(i, k).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= f64::EPSILON * 1e-3 * scale {
                return Err(Error::SingularPivot { row: k });
            }
            perm[k] = p;
            let last_col = (k + kl + ku).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    let (ik, ip) = (a.idx(k, j), a.idx(p, j));
                    a.data.swap(ik, ip);
                }
            }
            let pivot = a.data[a.idx(k, k)];
            for i in k + 1..=last_row {
                let ik = a.idx(i, k);
                let l = a.data[ik] / pivot;
                a.data[ik] = l;
                if l != 0.0 {
                    for j in k + 1..=last_col {
                        let kj = a.data[a.idx(k, j)];
                        let ij = a.idx(i, j);
                        a.data[ij] -= l * kj;
                    }
                }
            }
        }
        Ok(BandedLu { lu: a, perm })
    }
}

/// Factorized banded matrix, reusable for many right-hand sides.
#[derive(Debug, Clone)]
pub struct BandedLu {
    lu: BandedMatrix,
    perm: Vec<usize>,
}

impl BandedLu {
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let a = &self.lu;
        let n = a.n;
        let (kl, ku) = (a.kl, a.ku);
        for k in 0..n {
            let p = self.perm[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            if bk != 0.0 {
                for i in k + 1..=(k + kl).min(n - 1) {
                    b[i] -= a.data[a.idx(i, k)] * bk;
                }
            }
        }
        for k in (0..n).rev() {
            let mut acc = b[k];
            for j in k + 1..=(k + kl + ku).min(n - 1) {
                acc -= a.data[a.idx(k, j)] * b[j];
            }
            b[k] = acc / a.data[a.idx(k, k)];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

/// Solve `A x = b` for a banded `A`.
pub fn solve_banded(matrix: &BandedMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    if rhs.len() != matrix.n() {
        return Err(Error::Dimension(format!(
            "matrix of order {} with right-hand side of length {}",
            matrix.n(),
            rhs.len()
        )));
    }
    Ok(matrix.factor()?.solve(rhs))
}
