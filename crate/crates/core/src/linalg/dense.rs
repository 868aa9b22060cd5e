use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::C64;

/// Hermiticity tolerance enforced on every constructed operator.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Dense complex Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: DMatrix<C64>,
}

impl HermitianOperator {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch(matrix.nrows(), matrix.ncols()));
        }
        let dev = hermitian_deviation(&matrix);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.matrix[(i, j)]
    }

    pub fn max_hermitian_deviation(&self) -> f64 {
        hermitian_deviation(&self.matrix)
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let v = DVector::from_column_slice(x);
        (&self.matrix * v).as_slice().to_vec()
    }

    pub fn expectation(&self, x: &[C64]) -> f64 {
        crate::linalg::inner(x, &self.apply(x)).re
    }

    /// Max elementwise modulus of `[self, other]`.
    pub fn commutator_norm(&self, other: &DMatrix<C64>) -> f64 {
        let c = &self.matrix * other - other * &self.matrix;
        c.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Eigenvalues ascending with matching eigenvector columns.
    pub fn eigh(&self) -> Result<(Vec<f64>, DMatrix<C64>)> {
        let n = self.dim();
        let eig = self.matrix.clone().try_symmetric_eigen(f64::EPSILON, 10_000).ok_or(Error::Eigendecomposition)?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        Ok((values, vectors))
    }
}

fn hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}
