//! Linear-algebra kernels: symmetric tridiagonal eigensolvers for the parity
//! chains, dense Hermitian operators, 2x2 exponentials and Krylov exponentials.

mod dense;
mod krylov;
mod su2;
mod tridiag;

pub use dense::{HermitianOperator, HERMITIAN_TOL};
pub use krylov::expm_apply;
pub use su2::{expm2, mul2, spectral_norm2, Mat2};
pub use tridiag::{Eigensystem, SymTridiagonal};

use crate::C64;

pub fn norm(v: &[C64]) -> f64 {
    use num_traits::Float;
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `<a|b>` with the first argument conjugated.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
