use rabi_core::dynamics::{
    timescales, FrameChoice, Recording, RunOptions, StepControl, TimeGrid, Timescales, Trajectory,
};
use rabi_core::metrics::{
    bound_aw, bound_burgarth_q, bound_burgarth_sc, burgarth_q_moments, compare_trajectories, propagator_difference,
    AwBound, CorrelationResult, FourierSpectrum, MetricSeries,
};
use rabi_core::model::{
    coherent_amplitudes, lab_truncation, Frame, JointState, ModelParams, SemiclassicalParams, Spin,
};

use super::{conservation_violations, quantum_pair, sampling_grid, semiclassical_pair, Horizon, HorizonRule};
use crate::error::{config, Result};
use crate::fft::trajectory_spectrum;

/// Slack on the distance inequalities checked along a run.
const ORDER_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicsOptions {
    pub horizon: HorizonRule,
    pub correlation_cutoff: f64,
    /// Span of the semiclassical propagator comparison.
    pub propagator_horizon: f64,
    /// Keep joint states for the state-vector distances.
    pub snapshots: bool,
    pub frame: FrameChoice,
}

impl Default for DynamicsOptions {
    fn default() -> Self {
        Self {
            horizon: HorizonRule::Revivals(3.0),
            correlation_cutoff: rabi_core::metrics::DEFAULT_CORRELATION_CUTOFF,
            propagator_horizon: 200.0,
            snapshots: true,
            frame: FrameChoice::Auto,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PairSpectra {
    pub full: FourierSpectrum,
    pub rwa: FourierSpectrum,
    pub correlation: CorrelationResult,
}

impl PairSpectra {
    fn of(full: &Trajectory, rwa: &Trajectory, cutoff: f64) -> Result<Self> {
        let (f, r) = (trajectory_spectrum(full)?, trajectory_spectrum(rwa)?);
        let correlation = rabi_core::metrics::correlation(&f, &r, cutoff)?;
        Ok(Self { full: f, rwa: r, correlation })
    }
}

/// All four models at one parameter point with every distance and bound.
#[derive(Debug, Clone)]
pub struct DynamicsComparison {
    pub lambda: f64,
    pub alpha: f64,
    pub amplitude: f64,
    pub horizon: Horizon,
    pub timescales: Timescales,
    pub grid: TimeGrid,
    pub quantum_full: Trajectory,
    pub quantum_rwa: Trajectory,
    pub sc_full: Trajectory,
    pub sc_rwa: Trajectory,
    /// Quantum distances; `bound_value` holds the quantum state bound.
    pub metrics_q: MetricSeries,
    /// Semiclassical spinor distances; `bound_value` holds the propagator bound.
    pub metrics_sc: MetricSeries,
    pub aw: AwBound,
    /// `|(N+2)^{1/2} Psi|` and `|((N+2)(N+3))^{1/2} Psi|` of the initial state.
    pub moments: (f64, f64),
    pub propagator: BoundsTable,
    pub spectra_q: PairSpectra,
    pub spectra_sc: PairSpectra,
    /// Broken invariants and bounds; empty on a clean run.
    pub violations: Vec<String>,
}

impl DynamicsComparison {
    /// Ratio of the quantum bound to the measured norm difference at the
    /// sample nearest `t`.
    pub fn bound_factor_at(&self, t: f64) -> Option<f64> {
        let k = ((t / self.grid.dt()).round() as usize).min(self.grid.len() - 1);
        let nd = self.metrics_q.norm_diff.as_ref()?[k];
        let b = self.metrics_q.bound_value.as_ref()?[k];
        (nd > 0.0).then(|| b / nd)
    }

    /// Guide lines: `{tau_R, 2 tau_R}` in time and `{A, 2A}` in distance.
    pub fn guides(&self) -> ([f64; 2], [f64; 2]) {
        let tr = self.timescales.tau_r;
        ([tr, 2.0 * tr], [self.amplitude, 2.0 * self.amplitude])
    }

    pub fn frame(&self) -> Frame {
        match self.quantum_full.model {
            rabi_core::dynamics::Model::Quantum { frame, .. } => frame,
            _ => Frame::Lab,
        }
    }
}

/// The lab-frame initial state `|+z> (x) |alpha>`.
fn initial_state(alpha: f64) -> Result<JointState> {
    let amps = coherent_amplitudes(alpha, lab_truncation(alpha).max(1))?;
    Ok(JointState::product(Spin::Up, &amps, Frame::Lab)?)
}

/// Semiclassical propagator difference against its bound on `[0, t_max]`.
#[derive(Debug, Clone)]
pub struct BoundsTable {
    pub amplitude: f64,
    pub grid: TimeGrid,
    pub propagator_diff: Vec<f64>,
    pub bound_sc: Vec<f64>,
    pub aw: AwBound,
}

impl BoundsTable {
    pub fn holds(&self) -> bool {
        self.propagator_diff.iter().zip(&self.bound_sc).all(|(d, b)| *d <= *b)
    }
}

pub fn bounds_table(amplitude: f64, t_max: f64) -> Result<BoundsTable> {
    let p = SemiclassicalParams::resonant(amplitude)?;
    let grid = sampling_grid(t_max)?;
    let propagator_diff = propagator_difference(&p, &grid, &StepControl::default())?;
    let bound_sc = grid.times().map(|t| bound_burgarth_sc(amplitude, p.omega0, t)).collect();
    Ok(BoundsTable { amplitude, grid, propagator_diff, bound_sc, aw: bound_aw(amplitude, p.omega0)? })
}

/// Runs the quantum and semiclassical models, full and RWA, from `|+z>`
/// with the field in `|alpha>`, and evaluates every distance, bound and
/// spectral correlation between the full and RWA runs.
pub fn dynamics_comparison(lambda: f64, alpha: f64, opts: &DynamicsOptions) -> Result<DynamicsComparison> {
    if !(lambda > 0.0 && alpha > 0.0) {
        return Err(config("dynamics comparison needs lambda > 0 and alpha > 0"));
    }
    let amplitude = lambda * alpha;
    let horizon = opts.horizon.resolve(lambda, alpha)?;
    let grid = sampling_grid(horizon.t_end)?;
    let run =
        RunOptions { record: Recording { spin_density: true, snapshots: opts.snapshots }, ..RunOptions::default() };
    let (quantum_full, quantum_rwa) = quantum_pair(lambda, alpha, opts.frame, &grid, &run)?;
    let sc_run = RunOptions { record: Recording { spin_density: true, snapshots: true }, ..RunOptions::default() };
    let (sc_full, sc_rwa) = semiclassical_pair(amplitude, &grid, &sc_run)?;

    let params = ModelParams::resonant(lambda)?;
    let psi0 = initial_state(alpha)?;
    let moments = burgarth_q_moments(&psi0)?;
    let mut metrics_q = compare_trajectories(&quantum_full, &quantum_rwa)?;
    metrics_q.bound_value =
        Some(grid.times().map(|t| bound_burgarth_q(&params, &psi0, t)).collect::<rabi_core::Result<_>>()?);
    let mut metrics_sc = compare_trajectories(&sc_full, &sc_rwa)?;
    metrics_sc.bound_value = Some(grid.times().map(|t| bound_burgarth_sc(amplitude, params.omega0, t)).collect());

    let propagator = bounds_table(amplitude, opts.propagator_horizon)?;
    let spectra_q = PairSpectra::of(&quantum_full, &quantum_rwa, opts.correlation_cutoff)?;
    let spectra_sc = PairSpectra::of(&sc_full, &sc_rwa, opts.correlation_cutoff)?;

    let mut violations = Vec::new();
    for (name, tr) in
        [("quantum full", &quantum_full), ("quantum RWA", &quantum_rwa), ("sc full", &sc_full), ("sc RWA", &sc_rwa)]
    {
        violations.extend(conservation_violations(tr).into_iter().map(|v| format!("{name}: {v}")));
    }
    if let (Some(nd), Some(b)) = (&metrics_q.norm_diff, &metrics_q.bound_value) {
        if let Some(k) = (0..nd.len()).find(|&k| nd[k] > b[k]) {
            violations.push(format!("quantum state bound broken at t = {}", grid.t(k)));
        }
    }
    if let (Some(spin), Some(state)) = (&metrics_q.trace_dist_spin, &metrics_q.trace_dist_state) {
        if let Some(k) = (0..spin.len()).find(|&k| spin[k] > state[k] + ORDER_SLACK) {
            violations.push(format!("reduced-spin distance exceeds state distance at t = {}", grid.t(k)));
        }
    }
    if !propagator.holds() {
        violations.push("propagator bound broken".into());
    }

    Ok(DynamicsComparison {
        lambda,
        alpha,
        amplitude,
        horizon,
        timescales: timescales(lambda, alpha)?,
        grid,
        quantum_full,
        quantum_rwa,
        sc_full,
        sc_rwa,
        metrics_q,
        metrics_sc,
        aw: bound_aw(amplitude, params.omega0)?,
        moments,
        propagator,
        spectra_q,
        spectra_sc,
        violations,
    })
}

/// Time of the largest oscillation envelope in `[from, to]`. The envelope
/// is the peak-to-peak population swing over consecutive blocks of length
/// `block`; the centre of the widest block is returned.
pub fn envelope_peak(tr: &Trajectory, block: f64, from: f64, to: f64) -> Option<f64> {
    let dt = tr.grid.dt();
    let w = ((block / dt).ceil() as usize).max(2);
    let pop = &tr.excited_population;
    let mut best: Option<(f64, f64)> = None;
    let mut start = (from / dt).floor() as usize;
    while start + w <= pop.len() && tr.grid.t(start + w - 1) <= to {
        let seg = &pop[start..start + w];
        let swing = seg.iter().cloned().fold(f64::MIN, f64::max) - seg.iter().cloned().fold(f64::MAX, f64::min);
        let centre = tr.grid.t(start) + 0.5 * (w - 1) as f64 * dt;
        if best.map_or(true, |b| swing > b.0) {
            best = Some((swing, centre));
        }
        start += (w / 2).max(1);
    }
    best.map(|b| b.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_run_is_consistent() {
        let opts =
            DynamicsOptions { horizon: HorizonRule::Fixed(60.0), propagator_horizon: 20.0, ..Default::default() };
        let c = dynamics_comparison(0.1, 2.0, &opts).unwrap();
        assert!(c.violations.is_empty(), "{:?}", c.violations);
        assert_eq!(c.frame(), Frame::Lab);
        let nd = c.metrics_q.norm_diff.as_ref().unwrap();
        assert_eq!(nd.len(), c.grid.len());
        assert_eq!(nd[0], 0.0);
        assert!((c.amplitude - 0.2).abs() < 1e-15);
        // bound at t = 0 is lambda |(N+2)^{1/2} Psi| = lambda sqrt(alpha^2 + 2)
        let b0 = c.metrics_q.bound_value.as_ref().unwrap()[0];
        assert!((b0 - 0.1 * 6f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn envelope_finds_revival() {
        let opts = DynamicsOptions { horizon: HorizonRule::Revivals(1.5), snapshots: false, ..Default::default() };
        let (lambda, alpha) = (0.1, 3.0);
        let c = dynamics_comparison(lambda, alpha, &opts).unwrap();
        let ts = c.timescales;
        let peak = envelope_peak(&c.quantum_rwa, ts.tau_r, 0.5 * ts.tau_rev, 1.5 * ts.tau_rev).unwrap();
        assert!((peak / ts.tau_rev - 1.0).abs() < 0.15, "{peak} vs {}", ts.tau_rev);
    }
}
