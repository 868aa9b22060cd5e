use num_traits::Float;

use nalgebra::DMatrix;

use super::{Coupling, JointState, ModelParams, SemiclassicalParams, Spin};
use crate::error::{invalid, Result};
use crate::linalg::{HermitianOperator, Mat2};
use crate::C64;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

fn check_truncation(n_max: usize) -> Result<()> {
    if n_max < 1 {
        return Err(invalid("n_max must be at least 1"));
    }
    Ok(())
}

/// `(Omega/2) sigma_z + omega0 a^dag a + lambda (a^dag + a) sigma_x` on
/// Fock states `0..=n_max`.
pub fn build_full_hamiltonian(params: &ModelParams, n_max: usize) -> Result<HermitianOperator> {
    build_hamiltonian(params, n_max, Coupling::Full)
}

/// `(Omega/2) sigma_z + omega0 a^dag a + lambda (a^dag sigma_- + a sigma_+)`
/// with `sigma_+ = |+z><-z|`.
pub fn build_rwa_hamiltonian(params: &ModelParams, n_max: usize) -> Result<HermitianOperator> {
    build_hamiltonian(params, n_max, Coupling::Rwa)
}

pub fn build_hamiltonian(params: &ModelParams, n_max: usize, coupling: Coupling) -> Result<HermitianOperator> {
    check_truncation(n_max)?;
    let dim = 2 * (n_max + 1);
    let mut h = DMatrix::from_element(dim, dim, zero());
    let idx = |s, n| JointState::index(n_max, s, n);
    for spin in [Spin::Up, Spin::Down] {
        for n in 0..=n_max {
            h[(idx(spin, n), idx(spin, n))] = C64::from(0.5 * params.omega * spin.sign() + params.omega0 * n as f64);
        }
    }
    for n in 0..n_max {
        let g = C64::from(params.lambda * ((n + 1) as f64).sqrt());
        // co-rotating: |+z,n> <-> |-z,n+1>
        let (a, b) = (idx(Spin::Up, n), idx(Spin::Down, n + 1));
        h[(a, b)] = g;
        h[(b, a)] = g;
        if coupling == Coupling::Full {
            // counter-rotating: |-z,n> <-> |+z,n+1>
            let (a, b) = (idx(Spin::Down, n), idx(Spin::Up, n + 1));
            h[(a, b)] = g;
            h[(b, a)] = g;
        }
    }
    HermitianOperator::new(h)
}

/// Row-major semiclassical generator with basis order `(+z, -z)`.
pub fn semiclassical_matrix(p: &SemiclassicalParams, t: f64, coupling: Coupling) -> Mat2 {
    let half = C64::from(0.5 * p.omega);
    match coupling {
        Coupling::Full => {
            let drive = C64::from(2.0 * p.amplitude * (p.omega0 * t).cos());
            [[half, drive], [drive, -half]]
        }
        Coupling::Rwa => {
            // A (e^{i w t} sigma_- + e^{-i w t} sigma_+)
            let up = C64::from_polar(p.amplitude, -p.omega0 * t);
            [[half, up], [up.conj(), -half]]
        }
    }
}

/// `(Omega/2) sigma_z + 2A cos(omega0 t) sigma_x`, or its rotating-wave form
/// `(Omega/2) sigma_z + A (e^{i omega0 t} sigma_- + e^{-i omega0 t} sigma_+)`.
pub fn semiclassical_generator(p: &SemiclassicalParams, t: f64, coupling: Coupling) -> HermitianOperator {
    let m = semiclassical_matrix(p, t, coupling);
    HermitianOperator::new(DMatrix::from_fn(2, 2, |i, j| m[i][j])).expect("2x2 generator is Hermitian by construction")
}

/// Generator of the dynamics in the frame rotating at `omega0` with the
/// field, expressed in the displaced basis `D(alpha)|n>`:
///
/// `(Omega/2) sigma_z + 2 lambda alpha cos(omega0 t) sigma_x
///  + lambda (a^dag e^{i omega0 t} + a e^{-i omega0 t}) sigma_x`
///
/// (full), with both couplings restricted to co-rotating terms for the RWA.
/// The displaced vacuum `|0>` is the coherent state `|alpha>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacedGenerator {
    pub params: ModelParams,
    pub alpha: f64,
    pub n_max: usize,
    pub coupling: Coupling,
}

impl DisplacedGenerator {
    pub fn new(params: ModelParams, alpha: f64, n_max: usize, coupling: Coupling) -> Result<Self> {
        check_truncation(n_max)?;
        if !alpha.is_finite() {
            return Err(invalid("alpha must be finite"));
        }
        Ok(Self { params, alpha, n_max, coupling })
    }

    pub fn dim(&self) -> usize {
        2 * (self.n_max + 1)
    }

    /// `y += scale * H(t) x`.
    pub fn apply_add(&self, t: f64, scale: f64, x: &[C64], y: &mut [C64]) {
        let m = self.n_max + 1;
        let p = &self.params;
        let (up_x, down_x) = x.split_at(m);
        let (up_y, down_y) = y.split_at_mut(m);
        let half = scale * 0.5 * p.omega;
        let rot = C64::from_polar(scale * p.lambda, p.omega0 * t); // lambda e^{i w t}
        let rot_c = rot.conj();
        match self.coupling {
            Coupling::Full => {
                let drive = scale * 2.0 * p.lambda * self.alpha * (p.omega0 * t).cos();
                for n in 0..m {
                    up_y[n] += up_x[n] * half + down_x[n] * drive;
                    down_y[n] += down_x[n] * (-half) + up_x[n] * drive;
                }
                for n in 0..m - 1 {
                    let s = ((n + 1) as f64).sqrt();
                    // a^dag sigma_x: (s, n) -> (flip s, n+1)
                    up_y[n + 1] += rot * s * down_x[n];
                    down_y[n + 1] += rot * s * up_x[n];
                    // a sigma_x: (s, n+1) -> (flip s, n)
                    up_y[n] += rot_c * s * down_x[n + 1];
                    down_y[n] += rot_c * s * up_x[n + 1];
                }
            }
            Coupling::Rwa => {
                let drive = C64::from_polar(scale * p.lambda * self.alpha, p.omega0 * t); // on sigma_-
                let drive_c = drive.conj();
                for n in 0..m {
                    up_y[n] += up_x[n] * half + drive_c * down_x[n];
                    down_y[n] += down_x[n] * (-half) + drive * up_x[n];
                }
                for n in 0..m - 1 {
                    let s = ((n + 1) as f64).sqrt();
                    // a^dag sigma_-: (+z, n) -> (-z, n+1)
                    down_y[n + 1] += rot * s * up_x[n];
                    // a sigma_+: (-z, n+1) -> (+z, n)
                    up_y[n] += rot_c * s * down_x[n + 1];
                }
            }
        }
    }

    /// Dense `H(t)`.
    pub fn at(&self, t: f64) -> HermitianOperator {
        let dim = self.dim();
        let mut h = DMatrix::from_element(dim, dim, zero());
        let mut e = alloc::vec![zero(); dim];
        let mut col = alloc::vec![zero(); dim];
        for j in 0..dim {
            e[j] = C64::new(1.0, 0.0);
            col.iter_mut().for_each(|z| *z = zero());
            self.apply_add(t, 1.0, &e, &mut col);
            for i in 0..dim {
                h[(i, j)] = col[i];
            }
            e[j] = zero();
        }
        HermitianOperator::new(h).expect("displaced generator is Hermitian by construction")
    }
}

/// Dense displaced-frame generator at time `t`.
pub fn build_displaced_generator(
    params: &ModelParams,
    alpha: f64,
    n_max: usize,
    t: f64,
    coupling: Coupling,
) -> Result<HermitianOperator> {
    Ok(DisplacedGenerator::new(*params, alpha, n_max, coupling)?.at(t))
}
