//! Time evolution of the quantum and semiclassical models, observables
//! along a trajectory and the collapse/revival timescales.
//!
//! States of any model are stored spin-major, so a semiclassical spinor
//! `(c_up, c_down)` is the `n_max = 0` case of the joint layout and the same
//! observable code serves both.

mod lab;
mod propagate;
mod run;

pub use lab::{evolve_lab, LabOptions};
pub use propagate::{
    evolve_time_dependent, evolve_time_independent, ConstantGenerator, FnGenerator, Generator, SemiclassicalGenerator,
    StepControl, DEFAULT_STEP_TOL,
};
pub use run::{run_quantum, run_semiclassical, FrameChoice, RunOptions, DEFAULT_DIMENSION_BUDGET};

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;

use crate::error::{invalid, Result};
use crate::linalg::Mat2;
use crate::model::{Coupling, Frame, JointState};
use crate::C64;

/// Samples per field period `2 pi / omega0` used by the shipped experiments.
pub const SAMPLES_PER_PERIOD: usize = 64;

/// Reduced spin density matrix, rows and columns ordered `(+z, -z)`.
pub type SpinDensity = Mat2;

/// Uniform grid `t_k = k dt`, `k = 0..n_samples`, with `t_{n-1} = t_end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_end: f64,
    n_samples: usize,
}

impl TimeGrid {
    pub fn new(t_end: f64, n_samples: usize) -> Result<Self> {
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(invalid("t_end must be positive"));
        }
        if n_samples < 2 {
            return Err(invalid("a time grid needs at least two samples"));
        }
        Ok(Self { t_end, n_samples })
    }

    /// Grid on `[0, t_end]` with at least `SAMPLES_PER_PERIOD` samples per
    /// `2 pi` (units of `1 / omega0`).
    pub fn sampled(t_end: f64) -> Result<Self> {
        let period = 2.0 * PI / SAMPLES_PER_PERIOD as f64;
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(invalid("t_end must be positive"));
        }
        Self::new(t_end, (t_end / period).ceil() as usize + 1)
    }

    /// Grid with the exact spacing `dt` and `n_samples` points.
    pub fn from_step(dt: f64, n_samples: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(invalid("dt must be positive"));
        }
        Self::new(dt * (n_samples.max(2) - 1) as f64, n_samples)
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn len(&self) -> usize {
        self.n_samples
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dt(&self) -> f64 {
        self.t_end / (self.n_samples - 1) as f64
    }

    pub fn t(&self, k: usize) -> f64 {
        if k + 1 == self.n_samples {
            self.t_end
        } else {
            k as f64 * self.dt()
        }
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_samples).map(|k| self.t(k))
    }

    /// `dt <= 2 pi / (20 max_frequency)`.
    pub fn resolves(&self, max_frequency: f64) -> bool {
        self.dt() <= 2.0 * PI / (20.0 * max_frequency) * (1.0 + 1e-12)
    }
}

/// Which per-sample data a propagation keeps besides the populations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Recording {
    pub spin_density: bool,
    pub snapshots: bool,
}

impl Default for Recording {
    fn default() -> Self {
        Self { spin_density: true, snapshots: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Quantum {
        coupling: Coupling,
        frame: Frame,
    },
    Semiclassical {
        coupling: Coupling,
    },
    /// Produced directly by an integrator from a caller-supplied generator.
    Generic,
}

/// Worst deviations of the conserved quantities seen along a trajectory.
/// Quantities that are not conserved by the model are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Conservation {
    pub max_norm_error: f64,
    /// Relative to `max(|<H>(0)|, 1)`.
    pub energy_drift: Option<f64>,
    pub parity_drift: Option<f64>,
    pub excitation_drift: Option<f64>,
    /// Largest weight found at the edge of the retained basis.
    pub edge_weight: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub grid: TimeGrid,
    pub model: Model,
    /// Fock truncation of the stored states; `None` for spinors.
    pub n_max: Option<usize>,
    pub excited_population: Vec<f64>,
    /// Empty when not recorded.
    pub spin_density: Vec<SpinDensity>,
    pub snapshots: Option<Vec<Vec<C64>>>,
    pub final_state: Vec<C64>,
    pub conservation: Conservation,
}

impl Trajectory {
    /// Snapshot `k` as a joint state (quantum trajectories with snapshots).
    pub fn state(&self, k: usize) -> Option<JointState> {
        let frame = match self.model {
            Model::Quantum { frame, .. } => frame,
            _ => return None,
        };
        let amps = self.snapshots.as_ref()?.get(k)?.clone();
        JointState::new(amps, frame, self.n_max?).ok()
    }
}

/// Partial trace over the field of a spin-major state of any Fock size.
pub fn spin_density_of(amplitudes: &[C64]) -> SpinDensity {
    let m = amplitudes.len() / 2;
    let (up, down) = amplitudes.split_at(m);
    let mut pu = 0.0;
    let mut pd = 0.0;
    let mut coh = C64::new(0.0, 0.0);
    for (u, d) in up.iter().zip(down) {
        pu += u.norm_sqr();
        pd += d.norm_sqr();
        coh += u * d.conj();
    }
    [[C64::from(pu), coh], [coh.conj(), C64::from(pd)]]
}

pub fn reduced_spin_density(state: &JointState) -> SpinDensity {
    spin_density_of(state.amplitudes())
}

/// Accumulates observables sample by sample.
pub(crate) struct Recorder {
    pub excited: Vec<f64>,
    pub rho: Vec<SpinDensity>,
    pub snaps: Option<Vec<Vec<C64>>>,
    record_rho: bool,
    pub max_norm_error: f64,
}

impl Recorder {
    pub fn new(n_samples: usize, record_rho: bool, record_snapshots: bool) -> Self {
        Self {
            excited: Vec::with_capacity(n_samples),
            rho: if record_rho { Vec::with_capacity(n_samples) } else { Vec::new() },
            snaps: if record_snapshots { Some(Vec::with_capacity(n_samples)) } else { None },
            record_rho,
            max_norm_error: 0.0,
        }
    }

    pub fn record(&mut self, x: &[C64]) {
        let rho = spin_density_of(x);
        let total = rho[0][0].re + rho[1][1].re;
        self.max_norm_error = self.max_norm_error.max((total.sqrt() - 1.0).abs());
        self.excited.push(rho[0][0].re);
        if self.record_rho {
            self.rho.push(rho);
        }
        if let Some(s) = self.snaps.as_mut() {
            s.push(x.to_vec());
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Timescales {
    pub tau_r: f64,
    pub tau_col: f64,
    pub tau_rev: f64,
}

/// Rabi period `pi / (lambda alpha)`, collapse time `sqrt 2 / lambda` and
/// revival time `2 pi alpha / lambda` of a resonant coherent-state run.
pub fn timescales(lambda: f64, alpha: f64) -> Result<Timescales> {
    if !(lambda > 0.0 && alpha > 0.0 && lambda.is_finite() && alpha.is_finite()) {
        return Err(invalid("timescales need lambda > 0 and alpha > 0"));
    }
    Ok(Timescales { tau_r: PI / (lambda * alpha), tau_col: 2.0.sqrt() / lambda, tau_rev: 2.0 * PI * alpha / lambda })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Spin;

    #[test]
    fn grid_spacing_and_resolution() {
        let g = TimeGrid::sampled(2.0 * PI * 10.0).unwrap();
        assert_eq!(g.len(), 641);
        assert!((g.dt() - 2.0 * PI / 64.0).abs() < 1e-14);
        assert!(g.resolves(2.0));
        assert!(!TimeGrid::new(100.0, 10).unwrap().resolves(2.0));
        assert!(TimeGrid::new(1.0, 1).is_err());
        assert!(TimeGrid::new(-1.0, 10).is_err());
        assert_eq!(g.t(g.len() - 1), g.t_end());
    }

    #[test]
    fn timescale_values() {
        let lambda = 0.2 / 10.0.sqrt();
        let ts = timescales(lambda, 10.0.sqrt()).unwrap();
        assert!((ts.tau_r - 5.0 * PI).abs() < 1e-12);
        assert!((ts.tau_rev / ts.tau_col - 2.0.sqrt() * PI * 10.0.sqrt()).abs() < 1e-10);
        assert!(ts.tau_r < ts.tau_col && ts.tau_col < ts.tau_rev);
        assert!(timescales(0.0, 1.0).is_err());
    }

    #[test]
    fn spin_density_of_product_and_bell_states() {
        let field = crate::model::coherent_amplitudes(1.5, 40).unwrap();
        let psi = JointState::product(Spin::Up, &field, Frame::Lab).unwrap();
        let rho = reduced_spin_density(&psi);
        assert!((rho[0][0].re - 1.0).abs() < 1e-12 && rho[1][1].norm() < 1e-12 && rho[0][1].norm() < 1e-12);

        let mut bell = JointState::basis(Spin::Up, 0, 3, Frame::Lab).unwrap();
        let s = core::f64::consts::FRAC_1_SQRT_2;
        bell.amplitudes_mut()[0] = C64::from(s);
        bell.amplitudes_mut()[JointState::index(3, Spin::Down, 1)] = C64::from(s);
        let rho = reduced_spin_density(&bell);
        assert!((rho[0][0].re - 0.5).abs() < 1e-12 && (rho[1][1].re - 0.5).abs() < 1e-12);
        assert!(rho[0][1].norm() < 1e-12);
    }
}
