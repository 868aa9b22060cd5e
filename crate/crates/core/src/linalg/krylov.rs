use alloc::vec;
use alloc::vec::Vec;

use super::{inner, norm, SymTridiagonal};
use crate::error::{Error, Result};
use crate::C64;

/// `exp(-i tau H) v` by a Lanczos projection, with `H` given through
/// `matvec(x, y)` computing `y = H x`. Stops when the residual estimate
/// falls below `tol` (absolute, scaled by `|v|`).
pub fn expm_apply<F>(mut matvec: F, tau: f64, v: &[C64], tol: f64, max_dim: usize) -> Result<Vec<C64>>
where
    F: FnMut(&[C64], &mut [C64]),
{
    let n = v.len();
    let beta0 = norm(v);
    if beta0 == 0.0 {
        return Ok(vec![C64::new(0.0, 0.0); n]);
    }
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(max_dim + 1);
    basis.push(v.iter().map(|z| z / beta0).collect());
    let mut alphas: Vec<f64> = Vec::with_capacity(max_dim);
    let mut betas: Vec<f64> = Vec::with_capacity(max_dim);
    let mut w = vec![C64::new(0.0, 0.0); n];
    let mut last_residual = f64::INFINITY;

    for j in 0..max_dim.min(n) {
        matvec(&basis[j], &mut w);
        let a = inner(&basis[j], &w).re;
        for (wi, qi) in w.iter_mut().zip(&basis[j]) {
            *wi -= qi * a;
        }
        if j > 0 {
            let b = betas[j - 1];
            for (wi, qi) in w.iter_mut().zip(&basis[j - 1]) {
                *wi -= qi * b;
            }
        }
        // full reorthogonalisation
        for q in &basis {
            let c = inner(q, &w);
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= qi * c;
            }
        }
        alphas.push(a);
        let b = norm(&w);

        let t = SymTridiagonal::new(alphas.clone(), betas.clone())?;
        let es = t.eigen()?;
        let m = j + 1;
        let mut y = vec![C64::new(0.0, 0.0); m];
        for l in 0..m {
            let vl = es.vector(l);
            let weight = C64::from_polar(vl[0], -tau * es.values[l]);
            for (yk, &vkl) in y.iter_mut().zip(vl) {
                *yk += weight * vkl;
            }
        }
        let residual = b * y[m - 1].norm() * beta0;
        last_residual = residual;
        if residual <= tol || b <= 1e-14 * beta0 || m == n {
            let mut out = vec![C64::new(0.0, 0.0); n];
            for (q, yk) in basis.iter().zip(&y) {
                let c = yk * beta0;
                for (o, qi) in out.iter_mut().zip(q) {
                    *o += qi * c;
                }
            }
            return Ok(out);
        }
        betas.push(b);
        basis.push(w.iter().map(|z| z / b).collect());
    }
    Err(Error::Krylov { dim: max_dim, residual: last_residual })
}
