use faer::sparse::linalg::solvers::Lu;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use faer::prelude::Solve;

use crate::error::{Error, Result};

/// Sparse LU factorization of a square nonsymmetric matrix.
pub struct SparseLu {
    n: usize,
    lu: Lu<usize, f64>,
}

impl SparseLu {
    /// Factorizes the `n × n` matrix given by triplets (duplicates summed).
    pub fn new(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        if triplets.iter().any(|t| !t.2.is_finite()) {
            return Err(Error::LinearSolver("non-finite matrix entry".into()));
        }
        let t: Vec<Triplet<usize, usize, f64>> = triplets.iter().map(|&(i, j, v)| Triplet::new(i, j, v)).collect();
        let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &t)
            .map_err(|e| Error::LinearSolver(format!("matrix construction failed: {e:?}")))?;
        let lu = a
            .sp_lu()
            .map_err(|e| Error::LinearSolver(format!("LU factorization failed: {e:?}")))?;
        Ok(Self { n, lu })
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let b = Mat::from_fn(self.n, 1, |i, _| rhs[i]);
        let x = self.lu.solve(&b);
        let out: Vec<f64> = (0..self.n).map(|i| x[(i, 0)]).collect();
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::LinearSolver("singular matrix (non-finite solution)".into()));
        }
        Ok(out)
    }

    /// Solves for several right-hand sides stored column by column.
    pub fn solve_columns(&self, rhs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        let b = Mat::from_fn(self.n, rhs.len(), |i, j| rhs[j][i]);
        let x = self.lu.solve(&b);
        let out: Vec<Vec<f64>> = (0..rhs.len()).map(|j| (0..self.n).map(|i| x[(i, j)]).collect()).collect();
        if out.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::LinearSolver("singular matrix (non-finite solution)".into()));
        }
        Ok(out)
    }
}

/// Solves `A x = b` once.
pub fn solve_sparse(n: usize, triplets: &[(usize, usize, f64)], rhs: &[f64]) -> Result<Vec<f64>> {
    SparseLu::new(n, triplets)?.solve(rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_nonsymmetric_system() {
        let t = vec![(0, 0, 4.0), (0, 1, 1.0), (1, 0, 2.0), (1, 1, 3.0), (1, 1, 0.5), (2, 2, 1.0)];
        let x = solve_sparse(3, &t, &[1.0, 2.0, 3.0]).unwrap();
        // [[4,1],[2,3.5]] x = [1,2]
        let det = 4.0 * 3.5 - 2.0;
        assert!((x[0] - (3.5 - 2.0) / det).abs() < 1e-14);
        assert!((x[1] - (8.0 - 2.0) / det).abs() < 1e-14);
        assert!((x[2] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn singular_is_reported() {
        let t = vec![(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)];
        let r = SparseLu::new(2, &t).and_then(|lu| lu.solve(&[1.0, 2.0]));
        assert!(matches!(r, Err(Error::LinearSolver(_))));
    }
}
