use alloc::format;
use alloc::vec;

use super::lab::{evolve_lab, LabOptions};
use super::propagate::{propagate, SemiclassicalGenerator, StepControl};
use super::{Model, Recording, TimeGrid, Trajectory};
use crate::error::{invalid, Error, Result};
use crate::model::{
    coherent_amplitudes, displaced_start_truncation, lab_truncation, Coupling, DisplacedGenerator, FieldSpec, Frame,
    JointState, ModelParams, SemiclassicalParams, Spin,
};
use crate::C64;

/// Largest lab-frame truncation `run_quantum` accepts before switching
/// [`FrameChoice::Auto`] to the displaced frame.
pub const DEFAULT_DIMENSION_BUDGET: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameChoice {
    Lab,
    Displaced,
    /// Lab frame unless the coherent-state truncation exceeds the budget.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub initial_spin: Spin,
    pub record: Recording,
    pub step: StepControl,
    pub dimension_budget: usize,
    pub lab: LabOptions,
    /// Weight allowed on the top quarter of the displaced Fock register.
    pub displaced_tail_tol: f64,
    pub displaced_max_n: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            initial_spin: Spin::Up,
            record: Recording::default(),
            step: StepControl::default(),
            dimension_budget: DEFAULT_DIMENSION_BUDGET,
            lab: LabOptions::default(),
            displaced_tail_tol: 1e-14,
            displaced_max_n: 4096,
        }
    }
}

fn check_grid(grid: &TimeGrid, max_frequency: f64) -> Result<()> {
    if grid.resolves(max_frequency) {
        Ok(())
    } else {
        Err(invalid(format!(
            "time step {} does not resolve frequency {max_frequency} (need dt <= 2 pi / (20 w))",
            grid.dt()
        )))
    }
}

/// Quantum Rabi (or RWA) dynamics from `|spin> (x) field`.
pub fn run_quantum(
    params: &ModelParams,
    field: FieldSpec,
    coupling: Coupling,
    frame: FrameChoice,
    grid: &TimeGrid,
    opts: &RunOptions,
) -> Result<Trajectory> {
    check_grid(grid, params.omega0 + params.omega)?;
    let frame = match (frame, field) {
        (FrameChoice::Auto, FieldSpec::Coherent(alpha)) if lab_truncation(alpha) > opts.dimension_budget => {
            Frame::DisplacedRotating
        }
        (FrameChoice::Displaced, _) => Frame::DisplacedRotating,
        _ => Frame::Lab,
    };
    match (frame, field) {
        (Frame::Lab, _) => {
            let psi0 = match field {
                FieldSpec::Fock(n) => JointState::basis(opts.initial_spin, n, n + 1, Frame::Lab)?,
                FieldSpec::Coherent(alpha) => {
                    let amps = coherent_amplitudes(alpha, lab_truncation(alpha).max(1))?;
                    JointState::product(opts.initial_spin, &amps, Frame::Lab)?
                }
            };
            let lab = LabOptions { record: opts.record, ..opts.lab };
            evolve_lab(params, coupling, &psi0, grid, &lab)
        }
        (Frame::DisplacedRotating, FieldSpec::Fock(_)) => {
            Err(invalid("the displaced frame is defined for coherent fields only"))
        }
        (Frame::DisplacedRotating, FieldSpec::Coherent(alpha)) => run_displaced(params, alpha, coupling, grid, opts),
    }
}

/// Starts at the default displaced truncation and doubles it until the top
/// quarter of the register stays empty along the whole trajectory.
fn run_displaced(
    params: &ModelParams,
    alpha: f64,
    coupling: Coupling,
    grid: &TimeGrid,
    opts: &RunOptions,
) -> Result<Trajectory> {
    let mut n_max = displaced_start_truncation();
    loop {
        let g = DisplacedGenerator::new(*params, alpha, n_max, coupling)?;
        let psi0 = JointState::basis(opts.initial_spin, 0, n_max, Frame::DisplacedRotating)?;
        let tail_from = n_max + 1 - (n_max + 1) / 4;
        let (mut traj, tail) = propagate(
            &g,
            psi0.amplitudes(),
            grid,
            &opts.step,
            opts.record,
            Some((tail_from, opts.displaced_tail_tol)),
        )?;
        if tail <= opts.displaced_tail_tol {
            traj.model = Model::Quantum { coupling, frame: Frame::DisplacedRotating };
            traj.n_max = Some(n_max);
            return Ok(traj);
        }
        if 2 * n_max > opts.displaced_max_n {
            return Err(Error::Truncation {
                n_max,
                detail: format!("displaced register keeps weight {tail:e} in its top quarter"),
            });
        }
        n_max *= 2;
    }
}

/// Two-level dynamics under the classical drive, from `|+z>` by default.
pub fn run_semiclassical(
    p: &SemiclassicalParams,
    coupling: Coupling,
    grid: &TimeGrid,
    opts: &RunOptions,
) -> Result<Trajectory> {
    check_grid(grid, p.omega0 + p.omega)?;
    let psi0 = match opts.initial_spin {
        Spin::Up => vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        Spin::Down => vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
    };
    let g = SemiclassicalGenerator { params: *p, coupling };
    let (mut traj, _) = propagate(&g, &psi0, grid, &opts.step, opts.record, None)?;
    traj.model = Model::Semiclassical { coupling };
    Ok(traj)
}
