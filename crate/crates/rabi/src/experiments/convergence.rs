use rabi_core::dynamics::{FrameChoice, Model, Recording, RunOptions, TimeGrid, Trajectory};
use rabi_core::metrics::compare_trajectories;
use rabi_core::model::Frame;

use super::{
    conservation_violations, quantum_pair, sampling_grid, semiclassical_pair, spectral_correlation, HorizonRule,
};
use crate::error::{config, Result};
use crate::sweep::Runner;

/// Couplings at or below this run in the displaced frame regardless of
/// the dimension budget.
pub const DISPLACED_BELOW: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct ConvergenceRun {
    pub lambda: f64,
    pub alpha: f64,
    pub full: Trajectory,
    pub rwa: Trajectory,
    /// Full-vs-RWA trace distance of the joint states.
    pub trace_dist_state: Vec<f64>,
    /// Full-vs-RWA trace distance of the reduced spin states.
    pub trace_dist_spin: Vec<f64>,
    pub one_minus_r2: f64,
    pub frame: Frame,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub lambda: f64,
    pub amplitude: f64,
    pub one_minus_r2_q: Option<f64>,
    pub one_minus_r2_sc: f64,
    /// `(1 - r_q^2) / (1 - r_sc^2)`.
    pub ratio: Option<f64>,
    /// `max_t |P_q(t) - P_sc(t)|` for the full models.
    pub max_pop_dev: Option<f64>,
    /// The same for the RWA models.
    pub max_pop_dev_rwa: Option<f64>,
    /// `max_t |P_q,full(t) - P_q,RWA(t)|`.
    pub max_full_rwa_dev: Option<f64>,
    /// `max_t |D_spin,q(t) - D_sc(t)|`.
    pub max_spin_distance_dev: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    pub amplitude: f64,
    pub periods: f64,
    pub grid: TimeGrid,
    pub sc_full: Trajectory,
    pub sc_rwa: Trajectory,
    pub trace_dist_sc: Vec<f64>,
    pub one_minus_r2_sc: f64,
    /// Successful runs, in coupling order.
    pub runs: Vec<ConvergenceRun>,
    /// One row per requested coupling.
    pub rows: Vec<ConvergenceRow>,
}

fn sup_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn quantum_run(lambda: f64, amplitude: f64, grid: &TimeGrid, cutoff: f64) -> Result<ConvergenceRun> {
    let alpha = amplitude / lambda;
    let frame = if lambda <= DISPLACED_BELOW { FrameChoice::Displaced } else { FrameChoice::Auto };
    let opts = RunOptions { record: Recording { spin_density: true, snapshots: true }, ..RunOptions::default() };
    let (mut full, mut rwa) = quantum_pair(lambda, alpha, frame, grid, &opts)?;
    let m = compare_trajectories(&full, &rwa)?;
    let one_minus_r2 = spectral_correlation(&full, &rwa, cutoff)?.one_minus_r2;
    let mut violations = conservation_violations(&full);
    violations.extend(conservation_violations(&rwa));
    let frame = match full.model {
        Model::Quantum { frame, .. } => frame,
        _ => Frame::Lab,
    };
    // the states are only needed for the distances
    full.snapshots = None;
    rwa.snapshots = None;
    Ok(ConvergenceRun {
        lambda,
        alpha,
        full,
        rwa,
        trace_dist_state: m.trace_dist_state.unwrap_or_default(),
        trace_dist_spin: m.trace_dist_spin.unwrap_or_default(),
        one_minus_r2,
        frame,
        violations,
    })
}

/// Quantum runs at fixed `A = lambda alpha` over `periods` Rabi periods,
/// compared with the semiclassical model driven at the same `A`.
pub fn convergence_study(
    amplitude: f64,
    lambdas: &[f64],
    periods: f64,
    cutoff: f64,
    runner: &Runner,
) -> Result<ConvergenceStudy> {
    if lambdas.is_empty() || lambdas.iter().any(|l| !(*l > 0.0)) || !(amplitude > 0.0) {
        return Err(config("convergence study needs A > 0 and positive couplings"));
    }
    // tau_R = pi / A does not depend on how A splits into lambda and alpha
    let t_end = HorizonRule::RabiPeriods(periods).requested(1.0, amplitude)?;
    let grid = sampling_grid(t_end)?;
    let sc_opts = RunOptions { record: Recording { spin_density: true, snapshots: true }, ..RunOptions::default() };
    let (sc_full, sc_rwa) = semiclassical_pair(amplitude, &grid, &sc_opts)?;
    let trace_dist_sc = compare_trajectories(&sc_full, &sc_rwa)?.trace_dist_state.unwrap_or_default();
    let one_minus_r2_sc = spectral_correlation(&sc_full, &sc_rwa, cutoff)?.one_minus_r2;

    let results = runner.map("converge", lambdas, |&l| quantum_run(l, amplitude, &grid, cutoff))?;
    let mut runs = Vec::new();
    let mut rows = Vec::new();
    for (&lambda, res) in lambdas.iter().zip(results) {
        match res {
            Ok(run) => {
                rows.push(ConvergenceRow {
                    lambda,
                    amplitude,
                    one_minus_r2_q: Some(run.one_minus_r2),
                    one_minus_r2_sc,
                    ratio: Some(run.one_minus_r2 / one_minus_r2_sc),
                    max_pop_dev: Some(sup_dev(&run.full.excited_population, &sc_full.excited_population)),
                    max_pop_dev_rwa: Some(sup_dev(&run.rwa.excited_population, &sc_rwa.excited_population)),
                    max_full_rwa_dev: Some(sup_dev(&run.full.excited_population, &run.rwa.excited_population)),
                    max_spin_distance_dev: Some(sup_dev(&run.trace_dist_spin, &trace_dist_sc)),
                    error: None,
                });
                runs.push(run);
            }
            Err(e) => rows.push(ConvergenceRow {
                lambda,
                amplitude,
                one_minus_r2_q: None,
                one_minus_r2_sc,
                ratio: None,
                max_pop_dev: None,
                max_pop_dev_rwa: None,
                max_full_rwa_dev: None,
                max_spin_distance_dev: None,
                error: Some(e.to_string()),
            }),
        }
    }
    Ok(ConvergenceStudy { amplitude, periods, grid, sc_full, sc_rwa, trace_dist_sc, one_minus_r2_sc, runs, rows })
}
