use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};

const MAX_QL_ITERATIONS: usize = 64;

/// Real symmetric tridiagonal matrix stored as its diagonal and the
/// first off-diagonal (`off[i]` couples rows `i` and `i + 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

/// Eigenvalues in ascending order; eigenvector `k` occupies
/// `vectors[k * dim..(k + 1) * dim]`.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
    pub dim: usize,
}

impl Eigensystem {
    pub fn vector(&self, k: usize) -> &[f64] {
        &self.vectors[k * self.dim..(k + 1) * self.dim]
    }
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::DimensionMismatch(diag.len(), off.len() + 1));
        }
        Ok(Self { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.off[i] * x[i + 1];
            }
            y[i] = acc;
        }
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let mut d = self.diag.clone();
        let mut e = self.padded_off();
        implicit_ql(&mut d, &mut e, None)?;
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(d)
    }

    pub fn eigen(&self) -> Result<Eigensystem> {
        let n = self.dim();
        let mut d = self.diag.clone();
        let mut e = self.padded_off();
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
        implicit_ql(&mut d, &mut e, Some(&mut v))?;

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap());
        let values = order.iter().map(|&k| d[k]).collect();
        let mut vectors = Vec::with_capacity(n * n);
        for &k in &order {
            vectors.extend_from_slice(&v[k * n..(k + 1) * n]);
        }
        Ok(Eigensystem { values, vectors, dim: n })
    }

    fn padded_off(&self) -> Vec<f64> {
        let mut e = self.off.clone();
        e.push(0.0);
        e
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.dim() {
            let coupling = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            q = (self.diag[i] - x) - if i == 0 { 0.0 } else { coupling / q };
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + 1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue (0-based), by bisection on the
    /// Sturm count.
    pub fn kth_eigenvalue(&self, k: usize) -> Result<f64> {
        if k >= self.dim() {
            return Err(Error::DimensionMismatch(k, self.dim()));
        }
        let (mut lo, mut hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 4.0 * f64::EPSILON * scale {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Unit eigenvector for an eigenvalue `mu` by inverse iteration. The
    /// sign is fixed so that the largest-magnitude component is positive.
    pub fn eigenvector_for(&self, mu: f64) -> Result<Vec<f64>> {
        let n = self.dim();
        let scale = self.gershgorin().1.abs().max(1.0);
        let shift = mu + 16.0 * f64::EPSILON * scale;
        let lu = TridiagLu::factor(self, shift);
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * ((i * 7919) % 13) as f64).collect();
        for _ in 0..4 {
            lu.solve(&mut x);
            let nrm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !nrm.is_finite() || nrm == 0.0 {
                return Err(Error::Eigendecomposition);
            }
            x.iter_mut().for_each(|v| *v /= nrm);
        }
        let (imax, _) =
            x.iter().enumerate().fold((0, 0.0), |acc, (i, v)| if v.abs() > acc.1 { (i, v.abs()) } else { acc });
        if x[imax] < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
        Ok(x)
    }
}

/// LU factorisation with partial pivoting of `T - shift I`.
struct TridiagLu {
    // Upper factor: main, first and second super-diagonal.
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    mult: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    fn factor(t: &SymTridiagonal, shift: f64) -> Self {
        let n = t.dim();
        let tiny = f64::EPSILON * t.gershgorin().1.abs().max(1.0);
        let mut u0: Vec<f64> = t.diag.iter().map(|d| d - shift).collect();
        let mut u1: Vec<f64> = t.off.clone();
        u1.push(0.0);
        let mut u2 = vec![0.0; n];
        let mut lower: Vec<f64> = t.off.clone();
        let mut mult = vec![0.0; n];
        let mut swapped = vec![false; n];
        for i in 0..n.saturating_sub(1) {
            if lower[i].abs() > u0[i].abs() {
                swapped[i] = true;
                // swap rows i and i+1
                let (a0, a1, a2) = (u0[i], u1[i], u2[i]);
                u0[i] = lower[i];
                u1[i] = u0[i + 1];
                u2[i] = u1[i + 1];
                let m = a0 / u0[i];
                mult[i] = m;
                u0[i + 1] = a1 - m * u1[i];
                u1[i + 1] = a2 - m * u2[i];
            } else {
                if u0[i] == 0.0 {
                    u0[i] = tiny;
                }
                let m = lower[i] / u0[i];
                mult[i] = m;
                u0[i + 1] -= m * u1[i];
                u1[i + 1] -= m * u2[i];
            }
            lower[i] = 0.0;
        }
        if u0[n - 1] == 0.0 {
            u0[n - 1] = tiny;
        }
        Self { u0, u1, u2, mult, swapped }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= self.mult[i] * b[i];
        }
        for i in (0..n).rev() {
            let mut acc = b[i];
            if i + 1 < n {
                acc -= self.u1[i] * b[i + 1];
            }
            if i + 2 < n {
                acc -= self.u2[i] * b[i + 2];
            }
            b[i] = acc / self.u0[i];
        }
    }
}

// Implicit QL with Wilkinson-style shifts on a symmetric tridiagonal
// matrix (the tql2 scheme). `e[i]` couples `i` and `i + 1`; `e[n-1]` is
// scratch. Vectors, when present, are stored column-contiguous.
fn implicit_ql(d: &mut [f64], e: &mut [f64], mut v: Option<&mut [f64]>) -> Result<()> {
    let n = d.len();
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(Error::Eigendecomposition);
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = v.as_deref_mut() {
                        let (left, right) = v.split_at_mut((i + 1) * n);
                        let col_i = &mut left[i * n..];
                        let col_j = &mut right[..n];
                        for (a, b) in col_i.iter_mut().zip(col_j.iter_mut()) {
                            let hb = *b;
                            *b = s * *a + c * hb;
                            *a = c * *a - s * hb;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SymTridiagonal {
        SymTridiagonal::new(
            vec![0.5, 0.5, 2.5, 2.5, 4.5, 4.5, 6.5],
            vec![0.3, 0.3 * 1.4142, 0.3 * 1.732, 0.6, 0.3 * 2.236, 0.3 * 2.449],
        )
        .unwrap()
    }

    #[test]
    fn eigenvectors_satisfy_eigen_equation() {
        let t = sample();
        let es = t.eigen().unwrap();
        let mut y = vec![0.0; t.dim()];
        for k in 0..t.dim() {
            t.apply(es.vector(k), &mut y);
            for (yi, xi) in y.iter().zip(es.vector(k)) {
                assert!((yi - es.values[k] * xi).abs() < 1e-12);
            }
        }
        assert!(es.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn sturm_bisection_matches_ql() {
        let t = sample();
        let vals = t.eigenvalues().unwrap();
        for (k, v) in vals.iter().enumerate() {
            assert!((t.kth_eigenvalue(k).unwrap() - v).abs() < 1e-12);
        }
    }

    #[test]
    fn inverse_iteration_recovers_vector() {
        let t = sample();
        let es = t.eigen().unwrap();
        for k in 0..t.dim() {
            let x = t.eigenvector_for(es.values[k]).unwrap();
            let dot: f64 = x.iter().zip(es.vector(k)).map(|(a, b)| a * b).sum();
            assert!((dot.abs() - 1.0).abs() < 1e-10, "k={k} dot={dot}");
        }
    }

    #[test]
    fn decoupled_blocks_deflate() {
        let t = SymTridiagonal::new(vec![1.0, 1.0, 3.0, 3.0], vec![0.1, 0.0, 0.2]).unwrap();
        let vals = t.eigenvalues().unwrap();
        let want = [0.9, 1.1, 2.8, 3.2];
        for (a, b) in vals.iter().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(SymTridiagonal::new(vec![1.0, 2.0], vec![]).is_err());
        assert!(SymTridiagonal::new(vec![], vec![]).is_err());
    }
}
