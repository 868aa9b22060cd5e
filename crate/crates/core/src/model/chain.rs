use alloc::vec::Vec;

use num_traits::Float;

use super::{Coupling, JointState, ModelParams, Spin};
use crate::error::{invalid, Result};
use crate::linalg::SymTridiagonal;

/// Eigenvalue of `sigma_z (-1)^{a^dag a}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn value(self) -> i32 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
        }
    }

    pub fn of(spin: Spin, n: usize) -> Self {
        let photon = if n % 2 == 0 { 1 } else { -1 };
        let spin = if spin == Spin::Up { 1 } else { -1 };
        if photon * spin == 1 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// One parity sector of the lab-frame Rabi Hamiltonian.
///
/// Ordered by photon number, the sector holds exactly one state per `n`,
/// with alternating spin, and both the full and the rotating-wave
/// Hamiltonians are tridiagonal in that ordering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiChain {
    pub params: ModelParams,
    pub parity: Parity,
    pub coupling: Coupling,
    pub n_max: usize,
}

impl RabiChain {
    pub fn new(params: ModelParams, parity: Parity, coupling: Coupling, n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(invalid("n_max must be at least 1"));
        }
        Ok(Self { params, parity, coupling, n_max })
    }

    pub fn spin_at(&self, n: usize) -> Spin {
        if Parity::of(Spin::Up, n) == self.parity {
            Spin::Up
        } else {
            Spin::Down
        }
    }

    /// Position of chain site `n` in the spin-major joint basis.
    pub fn joint_index(&self, n: usize) -> usize {
        JointState::index(self.n_max, self.spin_at(n), n)
    }

    pub fn diagonal(&self, n: usize) -> f64 {
        self.params.omega0 * n as f64 + 0.5 * self.params.omega * self.spin_at(n).sign()
    }

    /// Coupling between sites `n - 1` and `n` (`n >= 1`).
    pub fn hopping(&self, n: usize) -> f64 {
        let g = self.params.lambda * (n as f64).sqrt();
        match self.coupling {
            Coupling::Full => g,
            // only a^dag sigma_- from |+z, n-1> survives
            Coupling::Rwa if self.spin_at(n - 1) == Spin::Up => g,
            Coupling::Rwa => 0.0,
        }
    }

    /// The tridiagonal block on sites `lo..=hi`, with `shift` subtracted
    /// from the diagonal.
    pub fn window(&self, lo: usize, hi: usize, shift: f64) -> Result<SymTridiagonal> {
        if lo > hi || hi > self.n_max {
            return Err(invalid("chain window out of range"));
        }
        let diag: Vec<f64> = (lo..=hi).map(|n| self.diagonal(n) - shift).collect();
        let off: Vec<f64> = (lo + 1..=hi).map(|n| self.hopping(n)).collect();
        SymTridiagonal::new(diag, off)
    }

    pub fn tridiagonal(&self) -> SymTridiagonal {
        self.window(0, self.n_max, 0.0).expect("full window is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_hamiltonian;

    #[test]
    fn parity_labels() {
        assert_eq!(Parity::of(Spin::Up, 0), Parity::Even);
        assert_eq!(Parity::of(Spin::Down, 1), Parity::Even);
        assert_eq!(Parity::of(Spin::Down, 0), Parity::Odd);
    }

    #[test]
    fn chains_reassemble_dense_hamiltonian() {
        let params = ModelParams::new(1.0, 0.8, 0.37).unwrap();
        let n_max = 9;
        for coupling in [Coupling::Full, Coupling::Rwa] {
            let dense = build_hamiltonian(&params, n_max, coupling).unwrap();
            let mut mass = 0.0;
            for parity in [Parity::Even, Parity::Odd] {
                let chain = RabiChain::new(params, parity, coupling, n_max).unwrap();
                for n in 0..=n_max {
                    let i = chain.joint_index(n);
                    assert!((dense.get(i, i).re - chain.diagonal(n)).abs() < 1e-15);
                    mass += chain.diagonal(n).abs();
                    if n > 0 {
                        let j = chain.joint_index(n - 1);
                        assert!((dense.get(i, j).re - chain.hopping(n)).abs() < 1e-15);
                        mass += 2.0 * chain.hopping(n).abs();
                    }
                }
            }
            let dense_mass: f64 = dense.matrix().iter().map(|z| z.norm()).sum();
            assert!((dense_mass - mass).abs() < 1e-12);
        }
    }
}
