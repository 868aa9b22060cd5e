use rabi_core::dynamics::{FrameChoice, Model};
use rabi_core::model::Frame;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{
    conservation_violations, populations_only, quantum_pair, sampling_grid, semiclassical_pair, spectral_correlation,
    Grid, Horizon, HorizonRule,
};
use crate::error::{config, Result};
use crate::sweep::Runner;

/// Grid and settings of a correlation sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub lambdas: Grid,
    /// Field amplitudes of the contour; unused by the slices.
    pub alphas: Grid,
    /// Drive amplitudes `A = lambda alpha` of the slices; iso-lines of the contour.
    pub amplitudes: Vec<f64>,
    pub horizon: HorizonRule,
    pub correlation_cutoff: f64,
    /// Also correlate the semiclassical pair of every contour cell.
    pub semiclassical: bool,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            lambdas: Grid::Log { start: 1e-3, stop: 0.3, count: 24 },
            alphas: Grid::Linear { start: 1.0, stop: 30.0, count: 24 },
            amplitudes: vec![0.05, 0.1, 0.15, 0.2, 0.25, 0.3],
            horizon: HorizonRule::Revivals(3.0),
            correlation_cutoff: rabi_core::metrics::DEFAULT_CORRELATION_CUTOFF,
            semiclassical: false,
        }
    }
}

impl SweepSpec {
    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("sweep spec serialises");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    Contour,
    Slices,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CellStatus {
    Ok,
    /// Ran over [`super::HORIZON_CAP`] instead of the requested span.
    HorizonCapped,
    Failed(String),
}

impl CellStatus {
    pub fn label(&self) -> &'static str {
        match self {
            CellStatus::Ok => "ok",
            CellStatus::HorizonCapped => "horizon-capped",
            CellStatus::Failed(_) => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub lambda: f64,
    pub alpha: f64,
    pub amplitude: f64,
    pub one_minus_r2_q: Option<f64>,
    pub one_minus_r2_sc: Option<f64>,
    pub t_end: f64,
    pub frame: Option<Frame>,
    pub n_max: Option<usize>,
    pub status: CellStatus,
    /// Broken conservation laws of the cell's trajectories.
    pub violations: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub kind: SweepKind,
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
    pub config_hash: String,
}

impl SweepResult {
    pub fn failures(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| matches!(r.status, CellStatus::Failed(_)))
    }

    /// Rows of one slice, in coupling order.
    pub fn slice(&self, amplitude: f64) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| (r.amplitude - amplitude).abs() <= 1e-12 * amplitude.max(1.0)).collect()
    }
}

pub const DETERMINISM_NOTE: &str = "no random numbers; cells are pure and merged in grid order";

struct QuantumCell {
    one_minus_r2: f64,
    frame: Option<Frame>,
    n_max: Option<usize>,
    violations: Vec<String>,
}

fn quantum_cell(lambda: f64, alpha: f64, horizon: &Horizon, cutoff: f64) -> Result<QuantumCell> {
    let grid = sampling_grid(horizon.t_end)?;
    let (full, rwa) = quantum_pair(lambda, alpha, FrameChoice::Auto, &grid, &populations_only())?;
    let corr = spectral_correlation(&full, &rwa, cutoff)?;
    let frame = match full.model {
        Model::Quantum { frame, .. } => Some(frame),
        _ => None,
    };
    let mut violations = conservation_violations(&full);
    violations.extend(conservation_violations(&rwa));
    Ok(QuantumCell { one_minus_r2: corr.one_minus_r2, frame, n_max: full.n_max.max(rwa.n_max), violations })
}

fn semiclassical_cell(amplitude: f64, t_end: f64, cutoff: f64) -> Result<f64> {
    let grid = sampling_grid(t_end)?;
    let (full, rwa) = semiclassical_pair(amplitude, &grid, &populations_only())?;
    Ok(spectral_correlation(&full, &rwa, cutoff)?.one_minus_r2)
}

fn row(lambda: f64, alpha: f64, amplitude: f64, spec: &SweepSpec, with_sc: bool) -> SweepRow {
    let mut out = SweepRow {
        lambda,
        alpha,
        amplitude,
        one_minus_r2_q: None,
        one_minus_r2_sc: None,
        t_end: f64::NAN,
        frame: None,
        n_max: None,
        status: CellStatus::Ok,
        violations: Vec::new(),
    };
    let horizon = match spec.horizon.resolve(lambda, alpha) {
        Ok(h) => h,
        Err(e) => {
            out.status = CellStatus::Failed(e.to_string());
            return out;
        }
    };
    out.t_end = horizon.t_end;
    match quantum_cell(lambda, alpha, &horizon, spec.correlation_cutoff) {
        Ok(c) => {
            out.one_minus_r2_q = Some(c.one_minus_r2);
            out.frame = c.frame;
            out.n_max = c.n_max;
            out.violations = c.violations;
        }
        Err(e) => {
            out.status = CellStatus::Failed(e.to_string());
            return out;
        }
    }
    if with_sc {
        match semiclassical_cell(amplitude, horizon.t_end, spec.correlation_cutoff) {
            Ok(v) => out.one_minus_r2_sc = Some(v),
            Err(e) => {
                out.status = CellStatus::Failed(e.to_string());
                return out;
            }
        }
    }
    if horizon.capped {
        out.status = CellStatus::HorizonCapped;
    }
    out
}

/// `1 - r_q^2` over the `(lambda, alpha)` grid, lambda-major. Cells that
/// fail are kept with their cause and the sweep carries on.
pub fn correlation_contour(spec: &SweepSpec, runner: &Runner) -> Result<SweepResult> {
    let lambdas = spec.lambdas.values()?;
    let alphas = spec.alphas.values()?;
    if lambdas.iter().chain(&alphas).any(|v| !(*v > 0.0)) {
        return Err(config("contour couplings and amplitudes must be positive"));
    }
    let cells: Vec<(f64, f64)> = lambdas.iter().flat_map(|&l| alphas.iter().map(move |&a| (l, a))).collect();
    let rows = runner.map("contour", &cells, |&(l, a)| row(l, a, l * a, spec, spec.semiclassical))?;
    Ok(SweepResult { kind: SweepKind::Contour, spec: spec.clone(), rows, config_hash: spec.hash() })
}

/// Quantum `1 - r_q^2` along lines of constant `A`, with `alpha = A / lambda`
/// per cell. The semiclassical value does not involve `lambda` and is
/// computed once per `A`, over the longest horizon of that slice.
pub fn constant_a_slices(spec: &SweepSpec, runner: &Runner) -> Result<SweepResult> {
    let lambdas = spec.lambdas.values()?;
    if spec.amplitudes.is_empty() || spec.amplitudes.iter().chain(&lambdas).any(|v| !(*v > 0.0)) {
        return Err(config("slices need positive amplitudes and couplings"));
    }
    let cells: Vec<(f64, f64)> = spec.amplitudes.iter().flat_map(|&a| lambdas.iter().map(move |&l| (a, l))).collect();
    let mut rows = runner.map("slices", &cells, |&(a, l)| row(l, a / l, a, spec, false))?;

    let sc_horizons: Vec<(f64, f64)> = spec
        .amplitudes
        .iter()
        .map(|&a| {
            let t =
                rows.iter().filter(|r| r.amplitude == a && r.t_end.is_finite()).map(|r| r.t_end).fold(0.0, f64::max);
            (a, t)
        })
        .collect();
    let sc = runner.map("slices-sc", &sc_horizons, |&(a, t)| {
        if t > 0.0 {
            semiclassical_cell(a, t, spec.correlation_cutoff).map_err(|e| e.to_string())
        } else {
            Err("no quantum cell of this slice produced a horizon".to_string())
        }
    })?;
    for r in rows.iter_mut() {
        let k = spec.amplitudes.iter().position(|&a| a == r.amplitude).expect("row amplitude from the spec");
        match &sc[k] {
            Ok(v) => r.one_minus_r2_sc = Some(*v),
            Err(e) if !matches!(r.status, CellStatus::Failed(_)) => r.status = CellStatus::Failed(e.clone()),
            Err(_) => {}
        }
    }
    Ok(SweepResult { kind: SweepKind::Slices, spec: spec.clone(), rows, config_hash: spec.hash() })
}
