//! Banded Gaussian elimination with partial pivoting.

use crate::error::{Error, Result};

/// Square matrix with `kl` sub- and `ku` super-diagonals. Each row keeps
/// `kl` extra columns on the right for pivoting fill-in.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            width,
            data: vec![0.0; n * width],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.ku + self.kl, "({i}, {j}) outside band");
        i * self.width + (j + self.kl - i)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.kl < i || j > i + self.ku {
            return 0.0;
        }
        self.data[self.offset(i, j)]
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(j + self.kl >= i && j <= i + self.ku, "({i}, {j}) outside band");
        let o = self.offset(i, j);
        self.data[o] += v;
    }

    /// Replaces row `i` by the identity row.
    pub fn set_identity_row(&mut self, i: usize) {
        let lo = i.saturating_sub(self.kl);
        let hi = (i + self.ku).min(self.n - 1);
        for j in lo..=hi {
            let o = self.offset(i, j);
            self.data[o] = 0.0;
        }
        let o = self.offset(i, i);
        self.data[o] = 1.0;
    }

    /// `y = A x`
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// Solves `A x = rhs`, consuming the matrix.
    pub fn solve(mut self, mut rhs: Vec<f64>) -> Result<Vec<f64>> {
        let n = self.n;
        assert_eq!(rhs.len(), n);
        let span = self.ku + self.kl;
        let scale = self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return Err(Error::Singular("zero matrix".into()));
        }
        for k in 0..n {
            let last_row = (k + self.kl).min(n - 1);
            let last_col = (k + span).min(n - 1);
            let mut p = k;
            let mut best = self.data[self.offset(k, k)].abs();
            for i in k + 1..=last_row {
                let v = self.data[self.offset(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= 1e-300f64.max(scale * f64::EPSILON * 1e-6) {
                return Err(Error::Singular(format!("zero pivot in column {k}")));
            }
            if p != k {
                for j in k..=last_col {
                    let (a, b) = (self.offset(k, j), self.offset(p, j));
                    self.data.swap(a, b);
                }
                rhs.swap(k, p);
            }
            let pivot = self.data[self.offset(k, k)];
            for i in k + 1..=last_row {
                let oik = self.offset(i, k);
                let factor = self.data[oik] / pivot;
                if factor == 0.0 {
                    continue;
                }
                self.data[oik] = 0.0;
                for j in k + 1..=last_col {
                    let akj = self.data[self.offset(k, j)];
                    let o = self.offset(i, j);
                    self.data[o] -= factor * akj;
                }
                rhs[i] -= factor * rhs[k];
            }
        }
        for k in (0..n).rev() {
            let last_col = (k + span).min(n - 1);
            let mut s = rhs[k];
            for j in k + 1..=last_col {
                s -= self.data[self.offset(k, j)] * rhs[j];
            }
            rhs[k] = s / self.data[self.offset(k, k)];
        }
        Ok(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tridiagonal_laplacian() {
        let n = 9;
        let mut a = BandMatrix::zeros(n, 1, 1);
        for i in 0..n {
            a.add(i, i, 2.0);
            if i > 0 {
                a.add(i, i - 1, -1.0);
            }
            if i + 1 < n {
                a.add(i, i + 1, -1.0);
            }
        }
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let b = a.mul_vec(&x_true);
        let x = a.solve(b).unwrap();
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).abs() < 1e-13);
        }
    }

    #[test]
    fn needs_pivoting() {
        // [[0, 1], [1, 0]] has a zero leading entry
        let mut a = BandMatrix::zeros(2, 1, 1);
        a.add(0, 1, 1.0);
        a.add(1, 0, 1.0);
        let x = a.solve(vec![3.0, 4.0]).unwrap();
        assert_eq!(x, vec![4.0, 3.0]);
    }

    #[test]
    fn singular_detected() {
        let mut a = BandMatrix::zeros(3, 1, 1);
        a.add(0, 0, 1.0);
        a.add(1, 0, 1.0);
        a.add(2, 2, 1.0);
        assert!(matches!(a.solve(vec![1.0; 3]), Err(Error::Singular(_))));
    }

    proptest! {
        #[test]
        fn pentadiagonal_random(vals in proptest::collection::vec(-1.0f64..1.0, 5 * 12), xs in proptest::collection::vec(-1.0f64..1.0, 12)) {
            let n = 12;
            let mut a = BandMatrix::zeros(n, 2, 2);
            for i in 0..n {
                for (d, off) in (-2i64..=2).enumerate() {
                    let j = i as i64 + off;
                    if j >= 0 && (j as usize) < n {
                        let v = vals[i * 5 + d] + if off == 0 { 5.0 } else { 0.0 };
                        a.add(i, j as usize, v);
                    }
                }
            }
            let b = a.mul_vec(&xs);
            let x = a.solve(b).unwrap();
            for (u, v) in x.iter().zip(&xs) {
                prop_assert!((u - v).abs() < 1e-10);
            }
        }
    }
}
