//! Figure reproductions built from the core kernels.

mod convergence;
mod dynamics;
mod splitting;
mod sweeps;

pub use convergence::{convergence_study, ConvergenceRow, ConvergenceRun, ConvergenceStudy};
pub use dynamics::{
    bounds_table, dynamics_comparison, envelope_peak, BoundsTable, DynamicsComparison, DynamicsOptions, PairSpectra,
};
pub use splitting::{branch_offset, splitting_scan, SplittingRow, SplittingScan};
pub use sweeps::{
    constant_a_slices, correlation_contour, CellStatus, SweepKind, SweepResult, SweepRow, SweepSpec, DETERMINISM_NOTE,
};

use std::fmt;
use std::str::FromStr;

use rabi_core::dynamics::{
    run_quantum, run_semiclassical, timescales, FrameChoice, Recording, RunOptions, TimeGrid, Trajectory,
};
use rabi_core::metrics::{correlation, CorrelationResult};
use rabi_core::model::{Coupling, FieldSpec, ModelParams, SemiclassicalParams};
use serde::{Deserialize, Serialize};

use crate::error::{config, Result};
use crate::fft::trajectory_spectrum;

/// Longest simulated time per cell; longer horizons are cut here and the
/// cell is flagged.
pub const HORIZON_CAP: f64 = 3e5;

/// How the simulated time span follows from `(lambda, alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HorizonRule {
    Fixed(f64),
    /// Multiples of the revival time `2 pi alpha / lambda`.
    Revivals(f64),
    /// Multiples of the Rabi period `pi / (lambda alpha)`.
    RabiPeriods(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Horizon {
    pub t_end: f64,
    /// Requested span before the cap.
    pub requested: f64,
    pub capped: bool,
}

impl HorizonRule {
    pub fn requested(&self, lambda: f64, alpha: f64) -> Result<f64> {
        let t = match *self {
            HorizonRule::Fixed(t) => t,
            HorizonRule::Revivals(k) => k * timescales(lambda, alpha)?.tau_rev,
            HorizonRule::RabiPeriods(k) => k * timescales(lambda, alpha)?.tau_r,
        };
        if !(t > 0.0 && t.is_finite()) {
            return Err(config(format!("horizon {self} gives a non-positive span")));
        }
        Ok(t)
    }

    pub fn resolve(&self, lambda: f64, alpha: f64) -> Result<Horizon> {
        let requested = self.requested(lambda, alpha)?;
        Ok(Horizon { t_end: requested.min(HORIZON_CAP), requested, capped: requested > HORIZON_CAP })
    }
}

impl fmt::Display for HorizonRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HorizonRule::Fixed(t) => write!(f, "{t}"),
            HorizonRule::Revivals(k) => write!(f, "{k}rev"),
            HorizonRule::RabiPeriods(k) => write!(f, "{k}rabi"),
        }
    }
}

/// `"3rev"`, `"20rabi"` (also `"20R"`) or a plain time such as `"200"`.
impl FromStr for HorizonRule {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let split = |suffix: &str| s.strip_suffix(suffix).map(|k| if k.is_empty() { "1" } else { k });
        let (k, make): (&str, fn(f64) -> HorizonRule) = if let Some(k) = split("rev") {
            (k, HorizonRule::Revivals)
        } else if let Some(k) = split("rabi").or_else(|| split("R")) {
            (k, HorizonRule::RabiPeriods)
        } else {
            (s, HorizonRule::Fixed)
        };
        match k.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(make(v)),
            _ => Err(config(format!("cannot read horizon {s:?}; use e.g. 3rev, 20rabi or 200"))),
        }
    }
}

/// A list of parameter values, given explicitly or as a range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grid {
    List(Vec<f64>),
    Linear { start: f64, stop: f64, count: usize },
    Log { start: f64, stop: f64, count: usize },
}

impl Grid {
    pub fn values(&self) -> Result<Vec<f64>> {
        let range = |start: f64, stop: f64, count: usize, log: bool| -> Result<Vec<f64>> {
            if count == 0 || !start.is_finite() || !stop.is_finite() || (log && !(start > 0.0 && stop > 0.0)) {
                return Err(config("range needs a positive count and finite (for log ranges positive) ends"));
            }
            if count == 1 {
                return Ok(vec![start]);
            }
            let (a, b) = if log { (start.ln(), stop.ln()) } else { (start, stop) };
            Ok((0..count)
                .map(|k| {
                    let x = a + (b - a) * k as f64 / (count - 1) as f64;
                    if log {
                        x.exp()
                    } else {
                        x
                    }
                })
                .collect())
        };
        let v = match self {
            Grid::List(v) => v.clone(),
            Grid::Linear { start, stop, count } => range(*start, *stop, *count, false)?,
            Grid::Log { start, stop, count } => range(*start, *stop, *count, true)?,
        };
        if v.is_empty() {
            return Err(config("empty parameter grid"));
        }
        Ok(v)
    }
}

/// `"0.1,0.2,0.3"`, `"lin:1:30:24"` or `"log:1e-3:0.3:24"`.
impl FromStr for Grid {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad =
            || config(format!("cannot read grid {s:?}; use a,b,c or lin:start:stop:count or log:start:stop:count"));
        let float = |v: &str| v.trim().parse::<f64>().map_err(|_| bad());
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [kind @ ("lin" | "log"), start, stop, count] => {
                let (start, stop) = (float(start)?, float(stop)?);
                let count = count.trim().parse::<usize>().map_err(|_| bad())?;
                let g =
                    if *kind == "lin" { Grid::Linear { start, stop, count } } else { Grid::Log { start, stop, count } };
                g.values()?;
                Ok(g)
            }
            [list] if !list.is_empty() => Ok(Grid::List(list.split(',').map(float).collect::<Result<_>>()?)),
            _ => Err(bad()),
        }
    }
}

/// A simulation grid over `t_end` at the default sampling density.
pub fn sampling_grid(t_end: f64) -> Result<TimeGrid> {
    Ok(TimeGrid::sampled(t_end)?)
}

/// Populations only: sweeps do not need spin densities or states.
pub(crate) fn populations_only() -> RunOptions {
    RunOptions { record: Recording { spin_density: false, snapshots: false }, ..RunOptions::default() }
}

/// Full and RWA quantum trajectories from `|+z> (x) |alpha>`.
pub(crate) fn quantum_pair(
    lambda: f64,
    alpha: f64,
    frame: FrameChoice,
    grid: &TimeGrid,
    opts: &RunOptions,
) -> Result<(Trajectory, Trajectory)> {
    let p = ModelParams::resonant(lambda)?;
    let field = FieldSpec::coherent(alpha)?;
    let full = run_quantum(&p, field, Coupling::Full, frame, grid, opts)?;
    let rwa = run_quantum(&p, field, Coupling::Rwa, frame, grid, opts)?;
    Ok((full, rwa))
}

pub(crate) fn semiclassical_pair(
    amplitude: f64,
    grid: &TimeGrid,
    opts: &RunOptions,
) -> Result<(Trajectory, Trajectory)> {
    let p = SemiclassicalParams::resonant(amplitude)?;
    Ok((run_semiclassical(&p, Coupling::Full, grid, opts)?, run_semiclassical(&p, Coupling::Rwa, grid, opts)?))
}

/// `1 - r^2` between the amplitude spectra of a full and an RWA population.
pub fn spectral_correlation(full: &Trajectory, rwa: &Trajectory, cutoff: f64) -> Result<CorrelationResult> {
    Ok(correlation(&trajectory_spectrum(full)?, &trajectory_spectrum(rwa)?, cutoff)?)
}

/// Tolerance on every conserved quantity of a shipped run.
pub const CONSERVATION_TOL: f64 = 1e-8;

/// Conservation and physicality violations of a trajectory, empty when all
/// recorded invariants hold to [`CONSERVATION_TOL`].
pub fn conservation_violations(tr: &Trajectory) -> Vec<String> {
    let c = &tr.conservation;
    let mut out = Vec::new();
    let mut check = |name: &str, v: Option<f64>| {
        if let Some(v) = v {
            if !(v <= CONSERVATION_TOL) {
                out.push(format!("{name} drift {v:e}"));
            }
        }
    };
    check("norm", Some(c.max_norm_error));
    check("energy", c.energy_drift);
    check("parity", c.parity_drift);
    check("excitation number", c.excitation_drift);
    if let Some(bad) = tr.excited_population.iter().find(|p| !(-CONSERVATION_TOL..=1.0 + CONSERVATION_TOL).contains(*p))
    {
        out.push(format!("population {bad} outside [0, 1]"));
    }
    for rho in &tr.spin_density {
        let (a, d) = (rho[0][0].re, rho[1][1].re);
        let trace = a + d;
        let low = 0.5 * (trace - ((a - d).powi(2) + 4.0 * rho[0][1].norm_sqr()).sqrt());
        if (trace - 1.0).abs() > CONSERVATION_TOL || low < -CONSERVATION_TOL {
            out.push(format!("spin density trace {trace}, lowest eigenvalue {low:e}"));
            break;
        }
    }
    out
}
