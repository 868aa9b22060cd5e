//! Distances between states, validity bounds for the rotating-wave
//! approximation and the Pearson comparison of Fourier spectra.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::Float;

use crate::dynamics::{
    evolve_time_dependent, Recording, SemiclassicalGenerator, SpinDensity, StepControl, TimeGrid, Trajectory,
};
use crate::error::{invalid, Error, Result};
use crate::linalg::{inner, spectral_norm2, Mat2};
use crate::model::{Coupling, Frame, JointState, ModelParams, SemiclassicalParams};
use crate::C64;

/// Hermiticity and trace tolerance for density matrices.
pub const DENSITY_TOL: f64 = 1e-8;
/// Upper frequency (units of `omega0`) of the spectral comparison.
pub const DEFAULT_CORRELATION_CUTOFF: f64 = 3.0;

fn same_dim(a: &[C64], b: &[C64]) -> Result<()> {
    if a.len() == b.len() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(a.len(), b.len()))
    }
}

/// `|psi1 - psi2|`.
pub fn norm_difference(psi1: &[C64], psi2: &[C64]) -> Result<f64> {
    same_dim(psi1, psi2)?;
    Ok(psi1.iter().zip(psi2).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt())
}

/// `sqrt(1 - |<psi1|psi2>|^2)`, the trace distance of two pure states.
///
/// Evaluated as the norm of the part of `psi2` orthogonal to `psi1`, which
/// avoids the cancellation in `1 - |<psi1|psi2>|^2` for nearly equal rays.
pub fn pure_trace_distance(psi1: &[C64], psi2: &[C64]) -> Result<f64> {
    same_dim(psi1, psi2)?;
    let c = inner(psi1, psi2);
    let r: f64 = psi1.iter().zip(psi2).map(|(a, b)| (b - c * a).norm_sqr()).sum();
    Ok(r.sqrt().min(1.0))
}

fn check_density(rho: &DMatrix<C64>) -> Result<()> {
    if !rho.is_square() {
        return Err(invalid("density matrix must be square"));
    }
    let n = rho.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            dev = dev.max((rho[(i, j)] - rho[(j, i)].conj()).norm());
        }
    }
    if dev > DENSITY_TOL {
        return Err(Error::NotHermitian(dev));
    }
    Ok(())
}

/// `(1/2) tr |rho1 - rho2|`.
pub fn trace_distance(rho1: &DMatrix<C64>, rho2: &DMatrix<C64>) -> Result<f64> {
    check_density(rho1)?;
    check_density(rho2)?;
    if rho1.shape() != rho2.shape() {
        return Err(Error::DimensionMismatch(rho1.nrows(), rho2.nrows()));
    }
    let mut diff = rho1 - rho2;
    // symmetrise away the tolerated non-Hermitian residue
    let adj = diff.adjoint();
    diff = (diff + adj) * C64::from(0.5);
    let eig = SymmetricEigen::try_new(diff, 1e-15, 10_000).ok_or(Error::Eigendecomposition)?;
    Ok(0.5 * eig.eigenvalues.iter().map(|x| x.abs()).sum::<f64>())
}

/// Trace distance of two 2x2 density matrices in closed form.
pub fn trace_distance2(rho1: &SpinDensity, rho2: &SpinDensity) -> f64 {
    let a = (rho1[0][0] - rho2[0][0]).re;
    let d = (rho1[1][1] - rho2[1][1]).re;
    let b = 0.5 * ((rho1[0][1] - rho2[0][1]) + (rho1[1][0] - rho2[1][0]).conj());
    let mean = 0.5 * (a + d);
    let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    0.5 * ((mean + radius).abs() + (mean - radius).abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AwBound {
    /// `2 A tau` with `tau = 2 pi / omega0`.
    pub level: f64,
    /// `1 / (2 A tau)`.
    pub horizon: f64,
}

/// Indicative error level and validity horizon of the averaging bound, with
/// the unspecified order constants set to one.
pub fn bound_aw(amplitude: f64, omega0: f64) -> Result<AwBound> {
    if !(amplitude > 0.0 && omega0 > 0.0) {
        return Err(invalid("bound_aw needs A > 0 and omega0 > 0"));
    }
    let level = 2.0 * amplitude * 2.0 * PI / omega0;
    Ok(AwBound { level, horizon: 1.0 / level })
}

/// `(|A| / omega0) (1 + 4 A T)`: bound on `|U(T) - U_RWA(T)|` for the driven
/// two-level system.
pub fn bound_burgarth_sc(amplitude: f64, omega0: f64, t: f64) -> f64 {
    amplitude.abs() / omega0 * (1.0 + 4.0 * amplitude.abs() * t)
}

/// The two number-operator norms entering the quantum bound:
/// `|(N + 2)^{1/2} Psi|` and `|((N + 2)(N + 3))^{1/2} Psi|`.
pub fn burgarth_q_moments(psi: &JointState) -> Result<(f64, f64)> {
    if psi.frame() != Frame::Lab {
        return Err(Error::WrongFrame);
    }
    let n_max = psi.n_max();
    let weights: Vec<f64> =
        (0..=n_max).map(|n| psi.amplitudes()[n].norm_sqr() + psi.amplitudes()[n_max + 1 + n].norm_sqr()).collect();
    let moment = |f: &dyn Fn(f64) -> f64, upto: usize| -> f64 {
        weights.iter().take(upto + 1).enumerate().map(|(n, w)| w * f(n as f64)).sum()
    };
    let first = |n: f64| n + 2.0;
    let second = |n: f64| (n + 2.0) * (n + 3.0);
    let (m1, m2) = (moment(&first, n_max), moment(&second, n_max));
    // truncation sensitivity: the top quarter of the register must not matter
    let lower = n_max - n_max / 4;
    let change = (m2 - moment(&second, lower)) / m2;
    if change > 1e-8 {
        return Err(Error::Truncation {
            n_max,
            detail: format!("number moments depend on the top Fock levels (relative change {change:e})"),
        });
    }
    Ok((m1.sqrt(), m2.sqrt()))
}

/// `(lambda / omega0) [|(N+2)^{1/2} Psi| + |t| 3 lambda |((N+2)(N+3))^{1/2} Psi|]`.
pub fn bound_burgarth_q(params: &ModelParams, psi: &JointState, t: f64) -> Result<f64> {
    let (m1, m2) = burgarth_q_moments(psi)?;
    let l = params.lambda;
    Ok(l / params.omega0 * (m1 + t.abs() * 3.0 * l * m2))
}

/// `|U(t) - U_RWA(t)|` (largest singular value) for the driven two-level
/// system at every sample of `grid`.
pub fn propagator_difference(p: &SemiclassicalParams, grid: &TimeGrid, ctl: &StepControl) -> Result<Vec<f64>> {
    let rec = Recording { spin_density: false, snapshots: true };
    let columns = |coupling| -> Result<[Trajectory; 2]> {
        let g = SemiclassicalGenerator { params: *p, coupling };
        let up = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let down = [C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
        Ok([evolve_time_dependent(&g, &up, grid, ctl, rec)?, evolve_time_dependent(&g, &down, grid, ctl, rec)?])
    };
    let full = columns(Coupling::Full)?;
    let rwa = columns(Coupling::Rwa)?;
    let snaps = |tr: &Trajectory| tr.snapshots.clone().expect("snapshots recorded");
    let (f0, f1, r0, r1) = (snaps(&full[0]), snaps(&full[1]), snaps(&rwa[0]), snaps(&rwa[1]));
    Ok((0..grid.len())
        .map(|k| {
            let d: Mat2 = [[f0[k][0] - r0[k][0], f1[k][0] - r1[k][0]], [f0[k][1] - r0[k][1], f1[k][1] - r1[k][1]]];
            spectral_norm2(&d)
        })
        .collect())
}

/// Per-sample comparison of a full and an RWA trajectory.
#[derive(Debug, Clone)]
pub struct MetricSeries {
    pub grid: TimeGrid,
    pub norm_diff: Option<Vec<f64>>,
    pub trace_dist_state: Option<Vec<f64>>,
    pub trace_dist_spin: Option<Vec<f64>>,
    pub bound_value: Option<Vec<f64>>,
}

/// Distances between two trajectories on the same grid. State distances need
/// snapshots in the same frame; the spin distance needs spin densities.
pub fn compare_trajectories(a: &Trajectory, b: &Trajectory) -> Result<MetricSeries> {
    if a.grid != b.grid {
        return Err(invalid("trajectories are sampled on different grids"));
    }
    let (mut norm_diff, mut trace_state) = (None, None);
    if let (Some(sa), Some(sb)) = (&a.snapshots, &b.snapshots) {
        let (mut nd, mut td) = (Vec::with_capacity(sa.len()), Vec::with_capacity(sa.len()));
        for (x, y) in sa.iter().zip(sb) {
            let (x, y) = pad_pair(x, y)?;
            nd.push(norm_difference(&x, &y)?);
            td.push(pure_trace_distance(&x, &y)?);
        }
        norm_diff = Some(nd);
        trace_state = Some(td);
    }
    let trace_spin = (!a.spin_density.is_empty() && !b.spin_density.is_empty())
        .then(|| a.spin_density.iter().zip(&b.spin_density).map(|(x, y)| trace_distance2(x, y)).collect());
    Ok(MetricSeries {
        grid: a.grid,
        norm_diff,
        trace_dist_state: trace_state,
        trace_dist_spin: trace_spin,
        bound_value: None,
    })
}

/// Brings two spin-major states of different Fock sizes to a common size.
fn pad_pair(x: &[C64], y: &[C64]) -> Result<(Vec<C64>, Vec<C64>)> {
    let m = x.len().max(y.len()) / 2;
    let widen = |v: &[C64]| -> Result<Vec<C64>> {
        if v.len() % 2 != 0 {
            return Err(invalid("state dimension must be even"));
        }
        let h = v.len() / 2;
        let mut out = alloc::vec![C64::new(0.0, 0.0); 2 * m];
        out[..h].copy_from_slice(&v[..h]);
        out[m..m + h].copy_from_slice(&v[h..]);
        Ok(out)
    };
    Ok((widen(x)?, widen(y)?))
}

/// Amplitude spectrum on the uniform angular-frequency axis
/// `omega_k = k d_omega`, `k = 0..len`, up to the Nyquist frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSpectrum {
    pub d_omega: f64,
    pub amplitudes: Vec<f64>,
    pub horizon: f64,
    pub dt: f64,
    pub detrended: bool,
}

impl FourierSpectrum {
    pub fn new(d_omega: f64, amplitudes: Vec<f64>, horizon: f64, dt: f64, detrended: bool) -> Result<Self> {
        if !(d_omega > 0.0) || amplitudes.is_empty() {
            return Err(invalid("spectrum needs a positive frequency step and at least one bin"));
        }
        if amplitudes.iter().any(|a| !(*a >= 0.0)) {
            return Err(invalid("spectral amplitudes must be non-negative"));
        }
        Ok(Self { d_omega, amplitudes, horizon, dt, detrended })
    }

    pub fn omega(&self, k: usize) -> f64 {
        k as f64 * self.d_omega
    }

    /// Index of the largest amplitude above `omega_min`.
    pub fn peak_above(&self, omega_min: f64) -> usize {
        let start = (omega_min / self.d_omega).ceil() as usize;
        (start..self.amplitudes.len())
            .max_by(|&a, &b| self.amplitudes[a].partial_cmp(&self.amplitudes[b]).unwrap())
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationResult {
    pub r: f64,
    pub one_minus_r2: f64,
}

/// Pearson correlation of two amplitude spectra over `0 <= omega <= cutoff`.
pub fn correlation(a: &FourierSpectrum, b: &FourierSpectrum, cutoff: f64) -> Result<CorrelationResult> {
    let same_axis = a.amplitudes.len() == b.amplitudes.len()
        && (a.d_omega - b.d_omega).abs() <= 1e-12 * a.d_omega
        && (a.horizon - b.horizon).abs() <= 1e-12 * a.horizon.abs().max(1.0)
        && (a.dt - b.dt).abs() <= 1e-12 * a.dt.abs().max(1e-300);
    if !same_axis {
        return Err(invalid("spectra are on different frequency axes"));
    }
    let bins = ((cutoff / a.d_omega).floor() as usize + 1).min(a.amplitudes.len());
    if bins < 2 {
        return Err(invalid("frequency cutoff leaves fewer than two bins"));
    }
    let (x, y) = (&a.amplitudes[..bins], &b.amplitudes[..bins]);
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (p, q) in x.iter().zip(y) {
        let (dx, dy) = (p - mx, q - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Degenerate("zero-variance spectrum".into()));
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    Ok(CorrelationResult { r, one_minus_r2: (1.0 - r * r).clamp(0.0, 1.0) })
}
