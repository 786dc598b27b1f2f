//! Sparse direct solves backed by faer's LU with partial pivoting.

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use crate::error::{Error, Result};

/// Required relative residual `‖b - A x‖ / ‖b‖` (infinity norm) of a
/// sparse solve.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Triplet-assembled square system. Duplicate entries are summed.
#[derive(Debug, Clone)]
pub struct SparseSystem {
    n: usize,
    entries: Vec<Triplet<usize, usize, f64>>,
}

impl SparseSystem {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            entries: Vec::new(),
        }
    }

    pub fn with_capacity(n: usize, nnz: usize) -> Self {
        Self {
            n,
            entries: Vec::with_capacity(nnz),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.entries.push(Triplet::new(i, j, v));
    }

    /// Drops every entry in the flagged rows and puts 1 on their diagonal.
    pub fn set_identity_rows(&mut self, rows: &[bool]) {
        self.entries.retain(|t| !rows[t.row]);
        for (i, _) in rows.iter().enumerate().filter(|(_, &r)| r) {
            self.entries.push(Triplet::new(i, i, 1.0));
        }
    }

    fn matrix(&self) -> Result<SparseColMat<usize, f64>> {
        SparseColMat::try_new_from_triplets(self.n, self.n, &self.entries)
            .map_err(|e| Error::Singular(format!("sparse assembly failed: {e:?}")))
    }

    /// `y = A x`
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for t in &self.entries {
            y[t.row] += t.val * x[t.col];
        }
        y
    }

    /// Sparse LU factorisation for repeated solves.
    pub fn factor(&self) -> Result<SparseLu> {
        let lu = self
            .matrix()?
            .sp_lu()
            .map_err(|e| Error::Singular(format!("sparse LU failed: {e:?}")))?;
        Ok(SparseLu { n: self.n, lu })
    }

    /// Solves `A x = b` by sparse LU, refining until the relative residual
    /// drops below [`RESIDUAL_TOL`].
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        assert_eq!(b.len(), self.n);
        let a = self.matrix()?;
        let lu = a
            .sp_lu()
            .map_err(|e| Error::Singular(format!("sparse LU failed: {e:?}")))?;
        let bnorm = norm(b);
        let rhs = Mat::<f64>::from_fn(self.n, 1, |i, _| b[i]);
        let sol = lu.solve(&rhs);
        let mut x: Vec<f64> = (0..self.n).map(|i| sol[(i, 0)]).collect();
        if bnorm == 0.0 {
            return Ok(x);
        }
        let mut rel = f64::INFINITY;
        for pass in 0..4 {
            let ax = self.mul_vec(&x);
            let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
            rel = norm(&r) / bnorm;
            if !rel.is_finite() {
                return Err(Error::Singular("non-finite sparse solution".into()));
            }
            if rel <= RESIDUAL_TOL || pass == 3 {
                break;
            }
            let rm = Mat::<f64>::from_fn(self.n, 1, |i, _| r[i]);
            let d = lu.solve(&rm);
            for (i, xi) in x.iter_mut().enumerate() {
                *xi += d[(i, 0)];
            }
        }
        if rel <= RESIDUAL_TOL {
            Ok(x)
        } else {
            Err(Error::Singular(format!(
                "sparse solve stalled at relative residual {rel:e}"
            )))
        }
    }
}

/// Factored [`SparseSystem`].
pub struct SparseLu {
    n: usize,
    lu: faer::sparse::linalg::solvers::Lu<usize, f64>,
}

impl SparseLu {
    /// One forward and back substitution, no refinement.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        assert_eq!(b.len(), self.n);
        let rhs = Mat::<f64>::from_fn(self.n, 1, |i, _| b[i]);
        let sol = self.lu.solve(&rhs);
        let x: Vec<f64> = (0..self.n).map(|i| sol[(i, 0)]).collect();
        if x.iter().all(|v| v.is_finite()) {
            Ok(x)
        } else {
            Err(Error::Singular("non-finite sparse solution".into()))
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed() {
        let mut s = SparseSystem::new(2);
        s.add(0, 0, 1.0);
        s.add(0, 0, 1.0);
        s.add(0, 1, 1.0);
        s.add(1, 1, 4.0);
        let x = s.solve(&[3.0, 4.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn identity_rows() {
        let mut s = SparseSystem::new(3);
        for i in 0..3 {
            s.add(i, i, 2.0);
        }
        s.add(0, 1, 5.0);
        s.set_identity_rows(&[true, false, false]);
        let x = s.solve(&[7.0, 2.0, 2.0]).unwrap();
        assert_eq!(x, vec![7.0, 1.0, 1.0]);
    }

    #[test]
    fn singular_reported() {
        let mut s = SparseSystem::new(2);
        s.add(0, 0, 1.0);
        s.add(1, 0, 1.0);
        assert!(s.solve(&[1.0, 1.0]).is_err());
    }
}
