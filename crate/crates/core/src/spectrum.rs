//! Rabi and RWA spectra, analytic breakdown couplings, numerically located
//! splitting points and inverse-square-root fits.

use alloc::format;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::linalg::SymTridiagonal;
use crate::model::{rwa_energy, Branch, Coupling, JointState, ModelParams, Parity, RabiChain};
use crate::C64;

/// Agreement required between a spectrum and its doubled-truncation check.
pub const DOUBLING_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    pub energy: f64,
    pub parity: Parity,
    /// Rank of the level within its parity sector.
    pub sector_index: usize,
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    pub params: ModelParams,
    pub coupling: Coupling,
    pub n_max: usize,
    pub levels: Vec<Level>,
    pub vectors: Vec<JointState>,
}

fn sector_chains(params: &ModelParams, coupling: Coupling, n_max: usize) -> Result<[RabiChain; 2]> {
    Ok([
        RabiChain::new(*params, Parity::Even, coupling, n_max)?,
        RabiChain::new(*params, Parity::Odd, coupling, n_max)?,
    ])
}

fn lowest_values(params: &ModelParams, coupling: Coupling, n_max: usize, k: usize) -> Result<Vec<f64>> {
    let mut all = Vec::with_capacity(2 * (n_max + 1));
    for chain in sector_chains(params, coupling, n_max)? {
        all.extend(chain.tridiagonal().eigenvalues()?);
    }
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    all.truncate(k);
    Ok(all)
}

/// Lowest `k_levels` eigenpairs of the full or RWA Hamiltonian, labelled by
/// parity. The eigenvalues are checked against a run at `2 n_max`.
pub fn compute_spectrum(params: &ModelParams, n_max: usize, k_levels: usize, coupling: Coupling) -> Result<Spectrum> {
    if k_levels == 0 || k_levels > n_max {
        return Err(invalid(format!("k_levels must lie in 1..={n_max}")));
    }
    let mut entries: Vec<(Level, Vec<C64>)> = Vec::new();
    for chain in sector_chains(params, coupling, n_max)? {
        let es = chain.tridiagonal().eigen()?;
        for (rank, &energy) in es.values.iter().enumerate().take(k_levels) {
            let mut amps = alloc::vec![C64::new(0.0, 0.0); 2 * (n_max + 1)];
            for (n, &v) in es.vector(rank).iter().enumerate() {
                amps[chain.joint_index(n)] = C64::from(v);
            }
            entries.push((Level { energy, parity: chain.parity, sector_index: rank }, amps));
        }
    }
    entries.sort_by(|a, b| a.0.energy.partial_cmp(&b.0.energy).unwrap());
    entries.truncate(k_levels);

    let check = lowest_values(params, coupling, 2 * n_max, k_levels)?;
    let worst = entries.iter().zip(&check).map(|(e, c)| (e.0.energy - c).abs()).fold(0.0, f64::max);
    if worst > DOUBLING_TOL {
        return Err(Error::Truncation {
            n_max,
            detail: format!("lowest {k_levels} levels move by {worst:e} when the truncation is doubled"),
        });
    }
    let mut levels = Vec::with_capacity(k_levels);
    let mut vectors = Vec::with_capacity(k_levels);
    for (level, amps) in entries {
        levels.push(level);
        vectors.push(JointState::new(amps, crate::model::Frame::Lab, n_max)?);
    }
    Ok(Spectrum { params: *params, coupling, n_max, levels, vectors })
}

/// Coupling at which the RWA levels with `n` and `n + 1` excitations first
/// cross, `omega0 / (sqrt(n) + sqrt(n+1))`; in the labelling of
/// [`rwa_energy`] these are `E_{n-1,+}` and `E_{n,-}`.
pub fn lambda_c_rwa(n: usize, omega0: f64) -> f64 {
    let n = n as f64;
    omega0 / (n.sqrt() + (n + 1.0).sqrt())
}

/// Upper edge of the perturbative ultrastrong regime,
/// `omega0 / sqrt(2 (2n + 1))`.
pub fn lambda_c_pusc(n: usize, omega0: f64) -> f64 {
    omega0 / (2.0 * (2.0 * n as f64 + 1.0)).sqrt()
}

/// Default threshold for splitting points, in units of `omega0`.
pub const DEFAULT_SPLITTING_DELTA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplittingOptions {
    pub coarse_step: f64,
    pub resolution: f64,
    /// Upper end of the scan, in units of `omega0`.
    pub lambda_max: f64,
    /// Coupling at which full and RWA levels are paired by rank.
    pub match_lambda: f64,
    /// Truncation; `None` selects `4 n + 60`.
    pub n_max: Option<usize>,
}

impl Default for SplittingOptions {
    fn default() -> Self {
        Self { coarse_step: 0.005, resolution: 1e-4, lambda_max: 1.0, match_lambda: 1e-3, n_max: None }
    }
}

pub fn splitting_truncation(n: usize) -> usize {
    4 * n + 60
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplittingPoint {
    pub n: usize,
    pub branch: Branch,
    pub delta: f64,
    pub lambda_s: f64,
    /// Sector rank of the tracked full-model level at `lambda_s`.
    pub rank: usize,
    /// Smallest adjacent-point eigenvector overlap seen while tracking.
    pub min_overlap: f64,
}

struct BranchTracker {
    params: ModelParams,
    parity: Parity,
    n_max: usize,
    rank: usize,
    vector: Vec<f64>,
    min_overlap: f64,
}

impl BranchTracker {
    fn chain(&self, lambda: f64) -> Result<SymTridiagonal> {
        Ok(RabiChain::new(self.params.with_lambda(lambda)?, self.parity, Coupling::Full, self.n_max)?.tridiagonal())
    }

    /// Energy of the continued branch at `lambda`, chosen among adjacent
    /// ranks by maximal overlap with the last accepted eigenvector.
    fn probe(&self, lambda: f64) -> Result<(usize, f64, Vec<f64>, f64)> {
        let t = self.chain(lambda)?;
        let lo = self.rank.saturating_sub(1);
        let hi = (self.rank + 1).min(t.dim() - 1);
        let mut best: Option<(usize, f64, Vec<f64>, f64)> = None;
        for rank in lo..=hi {
            let e = t.kth_eigenvalue(rank)?;
            let v = t.eigenvector_for(e)?;
            let ov = v.iter().zip(&self.vector).map(|(a, b)| a * b).sum::<f64>().abs();
            if best.as_ref().map_or(true, |b| ov > b.3) {
                best = Some((rank, e, v, ov));
            }
        }
        let best = best.expect("at least one candidate rank");
        if best.3 < 0.5 {
            return Err(Error::BranchTracking { lambda, overlap: best.3 });
        }
        Ok(best)
    }

    fn accept(&mut self, rank: usize, vector: Vec<f64>, overlap: f64) {
        self.rank = rank;
        self.vector = vector;
        self.min_overlap = self.min_overlap.min(overlap);
    }
}

/// Smallest coupling at which the full-model level continuing the RWA level
/// `(n, branch)` departs from it by more than `delta`.
pub fn find_splitting_point(
    n: usize,
    branch: Branch,
    delta: f64,
    params: &ModelParams,
    opts: &SplittingOptions,
) -> Result<SplittingPoint> {
    if !(delta > 0.0) {
        return Err(invalid("splitting threshold must be positive"));
    }
    if !params.is_resonant() {
        return Err(invalid("splitting points are defined at resonance"));
    }
    if !(opts.coarse_step > 0.0 && opts.resolution > 0.0 && opts.match_lambda > 0.0) {
        return Err(invalid("scan steps must be positive"));
    }
    let n_max = opts.n_max.unwrap_or_else(|| splitting_truncation(n));
    if n + 1 > n_max {
        return Err(invalid("truncation below the requested level"));
    }
    let parity = Parity::of(crate::model::Spin::Up, n);
    let zero_point = 0.5 * params.omega0;
    let reference =
        |lambda: f64| -> Result<f64> { Ok(rwa_energy(n, branch, &params.with_lambda(lambda)?) - zero_point) };

    // pair by rank at a small coupling where the two models agree
    let lm = opts.match_lambda;
    let rwa_chain = RabiChain::new(params.with_lambda(lm)?, parity, Coupling::Rwa, n_max)?.tridiagonal();
    let rwa_values = rwa_chain.eigenvalues()?;
    let target = reference(lm)?;
    let rank = rwa_values
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - target).abs().partial_cmp(&(b.1 - target).abs()).unwrap())
        .map(|(i, _)| i)
        .ok_or(Error::Eigendecomposition)?;
    let full = RabiChain::new(params.with_lambda(lm)?, parity, Coupling::Full, n_max)?.tridiagonal();
    let e0 = full.kth_eigenvalue(rank)?;
    let mut tracker =
        BranchTracker { params: *params, parity, n_max, rank, vector: full.eigenvector_for(e0)?, min_overlap: 1.0 };
    if (e0 - target).abs() > delta {
        return Err(invalid("threshold exceeded already at the matching coupling"));
    }

    let mut lo = lm;
    let mut k = 1usize;
    loop {
        let lambda = k as f64 * opts.coarse_step;
        k += 1;
        if lambda <= lm {
            continue;
        }
        if lambda > opts.lambda_max * params.omega0 + 1e-12 {
            return Err(Error::ExceedsScanRange { n, sign: branch.symbol(), limit: opts.lambda_max * params.omega0 });
        }
        let (r, e, v, ov) = tracker.probe(lambda)?;
        if (e - reference(lambda)?).abs() > delta {
            let mut hi = lambda;
            let hi_state = (r, v, ov);
            while hi - lo > opts.resolution {
                let mid = 0.5 * (lo + hi);
                let (r, e, v, ov) = tracker.probe(mid)?;
                if (e - reference(mid)?).abs() > delta {
                    hi = mid;
                } else {
                    lo = mid;
                    tracker.accept(r, v, ov);
                }
            }
            tracker.accept(hi_state.0, hi_state.1, hi_state.2);
            return Ok(SplittingPoint {
                n,
                branch,
                delta,
                lambda_s: hi,
                rank: tracker.rank,
                min_overlap: tracker.min_overlap,
            });
        }
        tracker.accept(r, v, ov);
        lo = lambda;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseSqrtFit {
    /// `c` in `c / sqrt(n + offset)`.
    pub coefficient: f64,
    /// Root-mean-square residual of the fixed-exponent fit.
    pub residual: f64,
    /// Free-exponent fit `prefactor * (n + offset)^exponent` (log-log least squares).
    pub prefactor: f64,
    pub exponent: f64,
    pub offset: u32,
}

/// Least-squares fit of `lambda_s = c / sqrt(n + offset)`, together with a
/// free power-law fit for validation.
pub fn fit_inverse_sqrt(points: &[(f64, f64)], offset: u32) -> Result<InverseSqrtFit> {
    if points.len() < 5 {
        return Err(Error::Degenerate(format!("need at least 5 points, got {}", points.len())));
    }
    if points.iter().any(|&(n, y)| !(n >= 1.0) || !(y > 0.0) || !y.is_finite()) {
        return Err(Error::Degenerate("points need n >= 1 and positive finite values".into()));
    }
    let off = offset as f64;
    let xs: Vec<f64> = points.iter().map(|&(n, _)| 1.0 / (n + off).sqrt()).collect();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(points).map(|(x, p)| x * p.1).sum();
    let coefficient = sxy / sxx;
    let rss: f64 = xs.iter().zip(points).map(|(x, p)| (p.1 - coefficient * x).powi(2)).sum();
    let residual = (rss / points.len() as f64).sqrt();

    let m = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|&(n, _)| (n + off).ln()).collect();
    let ly: Vec<f64> = points.iter().map(|&(_, y)| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let vxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if vxx <= 1e-300 {
        return Err(Error::Degenerate("all points share the same n".into()));
    }
    let vxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let exponent = vxy / vxx;
    let prefactor = (my - exponent * mx).exp();
    Ok(InverseSqrtFit { coefficient, residual, prefactor, exponent, offset })
}

/// One full-model branch at one coupling, with its paired RWA level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumRow {
    pub lambda: f64,
    pub parity: Parity,
    pub branch: usize,
    pub energy_full: f64,
    pub energy_rwa: f64,
    /// RWA doublet label; `None` for the uncoupled `|-z, 0>`.
    pub rwa_label: Option<(usize, Branch)>,
}

#[derive(Debug, Clone)]
pub struct SpectrumTable {
    pub lambda_grid: Vec<f64>,
    pub rows: Vec<SpectrumRow>,
    /// Smallest eigenvector overlap between adjacent couplings along any branch.
    pub min_overlap: f64,
}

/// RWA label of every sector rank, read off at a small coupling.
fn rwa_labels(
    params: &ModelParams,
    parity: Parity,
    n_max: usize,
    count: usize,
    match_lambda: f64,
) -> Result<Vec<Option<(usize, Branch)>>> {
    let p = params.with_lambda(match_lambda)?;
    let mut labelled: Vec<(f64, Option<(usize, Branch)>)> = Vec::new();
    for n in 0..n_max {
        if Parity::of(crate::model::Spin::Up, n) == parity {
            for b in [Branch::Minus, Branch::Plus] {
                labelled.push((rwa_energy(n, b, &p) - 0.5 * p.omega0, Some((n, b))));
            }
        }
    }
    if parity == Parity::of(crate::model::Spin::Down, 0) {
        labelled.push((-0.5 * p.omega, None));
    }
    labelled.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(labelled.into_iter().take(count).map(|(_, l)| l).collect())
}

/// Full and RWA spectra on a coupling grid, `levels` lowest levels in total
/// split evenly over the two parity sectors. Full branches are continued
/// by maximal adjacent eigenvector overlap.
pub fn spectrum_table(params: &ModelParams, lambdas: &[f64], levels: usize, n_max: usize) -> Result<SpectrumTable> {
    if lambdas.is_empty() || levels == 0 {
        return Err(invalid("need a non-empty grid and at least one level"));
    }
    if !params.is_resonant() {
        return Err(invalid("RWA pairing is defined at resonance"));
    }
    let per_sector = levels.div_ceil(2);
    if per_sector + 2 > n_max {
        return Err(invalid("truncation too small for the requested levels"));
    }
    let mut rows = Vec::new();
    let mut min_overlap: f64 = 1.0;
    for parity in [Parity::Even, Parity::Odd] {
        let labels = rwa_labels(params, parity, n_max, per_sector, 1e-3)?;
        // branch id -> last eigenvector
        let mut previous: Option<Vec<Vec<f64>>> = None;
        for &lambda in lambdas {
            let p = params.with_lambda(lambda)?;
            let es = RabiChain::new(p, parity, Coupling::Full, n_max)?.tridiagonal().eigen()?;
            let window = (per_sector + 2).min(es.values.len());
            // assignment[branch] = rank
            let assignment: Vec<usize> = match &previous {
                None => (0..per_sector).collect(),
                Some(prev) => {
                    let mut taken = alloc::vec![false; window];
                    let mut assign = alloc::vec![0usize; per_sector];
                    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
                    for (b, pv) in prev.iter().enumerate() {
                        for r in 0..window {
                            let ov = es.vector(r).iter().zip(pv).map(|(x, y)| x * y).sum::<f64>().abs();
                            pairs.push((ov, b, r));
                        }
                    }
                    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
                    let mut done = alloc::vec![false; per_sector];
                    for (ov, b, r) in pairs {
                        if !done[b] && !taken[r] {
                            done[b] = true;
                            taken[r] = true;
                            assign[b] = r;
                            min_overlap = min_overlap.min(ov);
                        }
                    }
                    assign
                }
            };
            let mut vecs = Vec::with_capacity(per_sector);
            for (branch, &rank) in assignment.iter().enumerate() {
                let label = labels[branch];
                let energy_rwa = match label {
                    Some((n, b)) => rwa_energy(n, b, &p) - 0.5 * p.omega0,
                    None => -0.5 * p.omega,
                };
                rows.push(SpectrumRow {
                    lambda,
                    parity,
                    branch,
                    energy_full: es.values[rank],
                    energy_rwa,
                    rwa_label: label,
                });
                vecs.push(es.vector(rank).to_vec());
            }
            previous = Some(vecs);
        }
    }
    Ok(SpectrumTable { lambda_grid: lambdas.to_vec(), rows, min_overlap })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn breakdown_formulas_small_n() {
        assert!((lambda_c_rwa(0, 1.0) - 1.0).abs() < 1e-15);
        assert!((lambda_c_rwa(1, 1.0) - 0.414_213_562_373_095).abs() < 1e-12);
        assert!((lambda_c_pusc(0, 1.0) - 0.707_106_781_186_547_5).abs() < 1e-12);
        assert!((lambda_c_pusc(1, 1.0) - 0.408_248_290_463_863).abs() < 1e-12);
    }

    #[test]
    fn large_n_limit() {
        let n = 10_000;
        let ratio = lambda_c_rwa(n, 1.0) * 2.0 * (n as f64).sqrt();
        assert!((ratio - 1.0).abs() < 1e-2);
    }

    #[test]
    fn pusc_converges_to_rwa_crossing() {
        for n in 12..200 {
            assert!((lambda_c_pusc(n, 1.0) - lambda_c_rwa(n, 1.0)).abs() < 0.01, "n = {n}");
        }
    }

    #[test]
    fn fit_recovers_synthetic_law() {
        let pts: Vec<(f64, f64)> = (1..20).map(|n| (n as f64, 0.5 / (n as f64).sqrt())).collect();
        let fit = fit_inverse_sqrt(&pts, 0).unwrap();
        assert!((fit.coefficient - 0.5).abs() < 1e-14);
        assert!(fit.residual < 1e-14);
        assert!((fit.exponent + 0.5).abs() < 1e-12);
        assert!((fit.prefactor - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fit_is_order_independent() {
        let mut pts: Vec<(f64, f64)> =
            (1..12).map(|n| (n as f64, 0.3 / (n as f64 + 1.0).sqrt() + 0.001 * (n % 3) as f64)).collect();
        let a = fit_inverse_sqrt(&pts, 1).unwrap();
        pts.reverse();
        pts.swap(2, 7);
        let b = fit_inverse_sqrt(&pts, 1).unwrap();
        assert!((a.coefficient - b.coefficient).abs() < 1e-15);
        assert!((a.exponent - b.exponent).abs() < 1e-13);
    }

    #[test]
    fn fit_rejects_degenerate_input() {
        let few: Vec<(f64, f64)> = (1..4).map(|n| (n as f64, 0.1)).collect();
        assert!(fit_inverse_sqrt(&few, 0).is_err());
        let same: Vec<(f64, f64)> = (0..6).map(|_| (3.0, 0.1)).collect();
        assert!(fit_inverse_sqrt(&same, 0).is_err());
        let zero: Vec<(f64, f64)> = (0..6).map(|n| (n as f64, 0.1)).collect();
        assert!(fit_inverse_sqrt(&zero, 0).is_err());
    }

    #[test]
    fn splitting_rejects_bad_threshold() {
        let p = ModelParams::resonant(0.0).unwrap();
        assert!(find_splitting_point(3, Branch::Plus, 0.0, &p, &SplittingOptions::default()).is_err());
    }

    #[test]
    fn splitting_beyond_scan_range_is_reported() {
        let p = ModelParams::resonant(0.0).unwrap();
        let opts = SplittingOptions { lambda_max: 0.02, ..Default::default() };
        let err = find_splitting_point(2, Branch::Plus, 0.05, &p, &opts).unwrap_err();
        assert!(matches!(err, Error::ExceedsScanRange { .. }));
    }
}
