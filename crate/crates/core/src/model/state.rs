use alloc::vec;
use alloc::vec::Vec;

use super::{Frame, Spin};
use crate::error::{invalid, Error, Result};
use crate::linalg;
use crate::C64;

/// Amplitudes over spin (x) Fock(0..=n_max), spin-major.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    amplitudes: Vec<C64>,
    frame: Frame,
    n_max: usize,
}

impl JointState {
    pub fn new(amplitudes: Vec<C64>, frame: Frame, n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(invalid("n_max must be at least 1"));
        }
        if amplitudes.len() != 2 * (n_max + 1) {
            return Err(Error::DimensionMismatch(amplitudes.len(), 2 * (n_max + 1)));
        }
        Ok(Self { amplitudes, frame, n_max })
    }

    pub fn index(n_max: usize, spin: Spin, n: usize) -> usize {
        match spin {
            Spin::Up => n,
            Spin::Down => n_max + 1 + n,
        }
    }

    pub fn basis(spin: Spin, n: usize, n_max: usize, frame: Frame) -> Result<Self> {
        if n > n_max {
            return Err(invalid("Fock index exceeds truncation"));
        }
        let mut amps = vec![C64::new(0.0, 0.0); 2 * (n_max + 1)];
        amps[Self::index(n_max, spin, n)] = C64::new(1.0, 0.0);
        Self::new(amps, frame, n_max)
    }

    /// `|spin> (x) |field>` with `field` indexed by Fock number.
    pub fn product(spin: Spin, field: &[C64], frame: Frame) -> Result<Self> {
        if field.len() < 2 {
            return Err(invalid("field register must hold at least two Fock states"));
        }
        let n_max = field.len() - 1;
        let mut amps = vec![C64::new(0.0, 0.0); 2 * (n_max + 1)];
        let start = Self::index(n_max, spin, 0);
        amps[start..start + n_max + 1].copy_from_slice(field);
        Self::new(amps, frame, n_max)
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitude(&self, spin: Spin, n: usize) -> C64 {
        self.amplitudes[Self::index(self.n_max, spin, n)]
    }

    /// Field amplitudes paired with one spin orientation.
    pub fn spin_block(&self, spin: Spin) -> &[C64] {
        let start = Self::index(self.n_max, spin, 0);
        &self.amplitudes[start..start + self.n_max + 1]
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.amplitudes)
    }

    pub fn inner(&self, other: &JointState) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(linalg::inner(&self.amplitudes, &other.amplitudes))
    }

    /// Excited-state population `<+z|rho_s|+z>`.
    pub fn excited_population(&self) -> f64 {
        self.spin_block(Spin::Up).iter().map(|z| z.norm_sqr()).sum()
    }

    /// Embed into a larger truncation, zero-filling the new Fock states.
    pub fn extended(&self, n_max: usize) -> Result<Self> {
        if n_max < self.n_max {
            return Err(invalid("cannot shrink a state by extension"));
        }
        let mut amps = vec![C64::new(0.0, 0.0); 2 * (n_max + 1)];
        for spin in [Spin::Up, Spin::Down] {
            let dst = Self::index(n_max, spin, 0);
            amps[dst..dst + self.n_max + 1].copy_from_slice(self.spin_block(spin));
        }
        Self::new(amps, self.frame, n_max)
    }

    /// Keep only Fock states up to `n_max` (no renormalisation).
    pub fn truncated(&self, n_max: usize) -> Result<Self> {
        if n_max > self.n_max {
            return self.extended(n_max);
        }
        let mut amps = Vec::with_capacity(2 * (n_max + 1));
        for spin in [Spin::Up, Spin::Down] {
            amps.extend_from_slice(&self.spin_block(spin)[..=n_max]);
        }
        Self::new(amps, self.frame, n_max)
    }
}
