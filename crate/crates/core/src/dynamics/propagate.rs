use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use super::{Conservation, Model, Recorder, Recording, TimeGrid, Trajectory};
use crate::error::{invalid, Error, Result};
use crate::linalg::{expm2, expm_apply, mul2, norm, HermitianOperator, Mat2};
use crate::model::{semiclassical_matrix, Coupling, DisplacedGenerator, SemiclassicalParams};
use crate::C64;

/// Default refinement tolerance on the state change, per unit time.
pub const DEFAULT_STEP_TOL: f64 = 1e-9;

/// A Hermitian generator `H(t)` known through its action on vectors.
pub trait Generator {
    fn dim(&self) -> usize;

    /// `y += scale * H(t) x`.
    fn apply_add(&self, t: f64, scale: f64, x: &[C64], y: &mut [C64]);

    /// The explicit matrix, for two-level generators.
    fn matrix2(&self, _t: f64) -> Option<Mat2> {
        None
    }
}

impl Generator for DisplacedGenerator {
    fn dim(&self) -> usize {
        DisplacedGenerator::dim(self)
    }

    fn apply_add(&self, t: f64, scale: f64, x: &[C64], y: &mut [C64]) {
        DisplacedGenerator::apply_add(self, t, scale, x, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiclassicalGenerator {
    pub params: SemiclassicalParams,
    pub coupling: Coupling,
}

fn apply_mat2(m: &Mat2, scale: f64, x: &[C64], y: &mut [C64]) {
    y[0] += (m[0][0] * x[0] + m[0][1] * x[1]) * scale;
    y[1] += (m[1][0] * x[0] + m[1][1] * x[1]) * scale;
}

impl Generator for SemiclassicalGenerator {
    fn dim(&self) -> usize {
        2
    }

    fn apply_add(&self, t: f64, scale: f64, x: &[C64], y: &mut [C64]) {
        apply_mat2(&semiclassical_matrix(&self.params, t, self.coupling), scale, x, y);
    }

    fn matrix2(&self, t: f64) -> Option<Mat2> {
        Some(semiclassical_matrix(&self.params, t, self.coupling))
    }
}

fn dense_apply_add(op: &HermitianOperator, scale: f64, x: &[C64], y: &mut [C64]) {
    let m = op.matrix();
    for j in 0..op.dim() {
        let xj = x[j] * scale;
        if xj == C64::new(0.0, 0.0) {
            continue;
        }
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += m[(i, j)] * xj;
        }
    }
}

fn dense_matrix2(op: &HermitianOperator) -> Option<Mat2> {
    (op.dim() == 2).then(|| [[op.get(0, 0), op.get(0, 1)], [op.get(1, 0), op.get(1, 1)]])
}

/// A time-independent generator.
#[derive(Debug, Clone)]
pub struct ConstantGenerator(pub HermitianOperator);

impl Generator for ConstantGenerator {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn apply_add(&self, _t: f64, scale: f64, x: &[C64], y: &mut [C64]) {
        dense_apply_add(&self.0, scale, x, y)
    }

    fn matrix2(&self, _t: f64) -> Option<Mat2> {
        dense_matrix2(&self.0)
    }
}

/// A generator given as `t -> HermitianOperator`; rebuilt on every call.
pub struct FnGenerator<F> {
    pub dim: usize,
    pub f: F,
}

impl<F: Fn(f64) -> HermitianOperator> Generator for FnGenerator<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply_add(&self, t: f64, scale: f64, x: &[C64], y: &mut [C64]) {
        dense_apply_add(&(self.f)(t), scale, x, y)
    }

    fn matrix2(&self, t: f64) -> Option<Mat2> {
        dense_matrix2(&(self.f)(t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    /// Accepted change between the `h` and `h/2` solutions, per unit time.
    pub step_tol: f64,
    pub max_halvings: u32,
    pub krylov_tol: f64,
    pub krylov_max_dim: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self { step_tol: DEFAULT_STEP_TOL, max_halvings: 24, krylov_tol: 1e-14, krylov_max_dim: 60 }
    }
}

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Fourth-order commutator-free step from `t` to `t + h`.
fn cf4_step<G: Generator + ?Sized>(g: &G, t: f64, h: f64, x: &[C64], ctl: &StepControl) -> Result<Vec<C64>> {
    let t1 = t + (0.5 - SQRT3 / 6.0) * h;
    let t2 = t + (0.5 + SQRT3 / 6.0) * h;
    let b1 = 0.25 + SQRT3 / 6.0;
    let b2 = 0.25 - SQRT3 / 6.0;
    if let (Some(m1), Some(m2)) = (g.matrix2(t1), g.matrix2(t2)) {
        let comb = |p: f64, q: f64| -> Mat2 {
            let mut c = [[C64::new(0.0, 0.0); 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    c[i][j] = m1[i][j] * p + m2[i][j] * q;
                }
            }
            c
        };
        let u = mul2(&expm2(&comb(b2, b1), h), &expm2(&comb(b1, b2), h));
        return Ok(vec![u[0][0] * x[0] + u[0][1] * x[1], u[1][0] * x[0] + u[1][1] * x[1]]);
    }
    let tol = ctl.krylov_tol;
    let y = expm_apply(
        |v, w| {
            w.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            g.apply_add(t1, b1, v, w);
            g.apply_add(t2, b2, v, w);
        },
        h,
        x,
        tol,
        ctl.krylov_max_dim,
    )?;
    expm_apply(
        |v, w| {
            w.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            g.apply_add(t1, b2, v, w);
            g.apply_add(t2, b1, v, w);
        },
        h,
        &y,
        tol,
        ctl.krylov_max_dim,
    )
}

fn advance<G: Generator + ?Sized>(
    g: &G,
    t0: f64,
    span: f64,
    steps: usize,
    x: &[C64],
    ctl: &StepControl,
) -> Result<Vec<C64>> {
    let h = span / steps as f64;
    let mut y = x.to_vec();
    for s in 0..steps {
        y = cf4_step(g, t0 + s as f64 * h, h, &y, ctl)?;
    }
    Ok(y)
}

/// Result of a raw propagation: the trajectory plus the largest weight
/// seen on Fock levels `>= tail.0` (if requested). Propagation stops early,
/// leaving a partial trajectory, once that weight exceeds `tail.1`.
pub(crate) fn propagate<G: Generator + ?Sized>(
    g: &G,
    psi0: &[C64],
    grid: &TimeGrid,
    ctl: &StepControl,
    rec: Recording,
    tail_limit: Option<(usize, f64)>,
) -> Result<(Trajectory, f64)> {
    let dim = g.dim();
    if psi0.len() != dim {
        return Err(Error::DimensionMismatch(psi0.len(), dim));
    }
    if dim % 2 != 0 {
        return Err(invalid("state dimension must be even (spin-major layout)"));
    }
    if !(ctl.step_tol > 0.0) {
        return Err(invalid("step_tol must be positive"));
    }
    let m = dim / 2;
    let tail = |x: &[C64]| -> f64 {
        tail_limit.map_or(0.0, |(from, _)| (from.min(m)..m).map(|n| x[n].norm_sqr() + x[m + n].norm_sqr()).sum())
    };
    let mut recorder = Recorder::new(grid.len(), rec.spin_density, rec.snapshots);
    let mut x = psi0.to_vec();
    recorder.record(&x);
    let mut edge = tail(&x);
    let mut steps = 1usize;
    let max_steps = 1usize << ctl.max_halvings;
    for k in 1..grid.len() {
        let t0 = grid.t(k - 1);
        let span = grid.t(k) - t0;
        let allowed = ctl.step_tol * span;
        let mut coarse = advance(g, t0, span, steps, &x, ctl)?;
        loop {
            let fine = advance(g, t0, span, 2 * steps, &x, ctl)?;
            let change = norm(&coarse.iter().zip(&fine).map(|(a, b)| a - b).collect::<Vec<_>>());
            if change <= allowed {
                x = fine;
                if change < allowed / 64.0 && steps > 1 {
                    steps /= 2;
                }
                break;
            }
            steps *= 2;
            if steps > max_steps {
                return Err(Error::StepRefinement { halvings: ctl.max_halvings, change });
            }
            coarse = fine;
        }
        recorder.record(&x);
        edge = edge.max(tail(&x));
        if tail_limit.is_some_and(|(_, limit)| edge > limit) {
            break;
        }
    }
    let conservation =
        Conservation { max_norm_error: recorder.max_norm_error, edge_weight: edge, ..Default::default() };
    Ok((
        Trajectory {
            grid: *grid,
            model: Model::Generic,
            n_max: None,
            excited_population: recorder.excited,
            spin_density: recorder.rho,
            snapshots: recorder.snaps,
            final_state: x,
            conservation,
        },
        edge,
    ))
}

/// Integrates `i d psi/dt = H(t) psi` with a fourth-order commutator-free
/// exponential scheme. Each sampling interval is integrated with `s` and
/// `2s` steps; `s` doubles until the two agree to `step_tol` per unit time.
pub fn evolve_time_dependent<G: Generator + ?Sized>(
    g: &G,
    psi0: &[C64],
    grid: &TimeGrid,
    ctl: &StepControl,
    rec: Recording,
) -> Result<Trajectory> {
    propagate(g, psi0, grid, ctl, rec, None).map(|(tr, _)| tr)
}

/// Exact evolution under a constant `H` via one eigendecomposition.
pub fn evolve_time_independent(
    h: &HermitianOperator,
    psi0: &[C64],
    grid: &TimeGrid,
    rec: Recording,
) -> Result<Trajectory> {
    let dim = h.dim();
    if psi0.len() != dim {
        return Err(Error::DimensionMismatch(psi0.len(), dim));
    }
    if dim % 2 != 0 {
        return Err(invalid("state dimension must be even (spin-major layout)"));
    }
    let (vals, vecs) = h.eigh()?;
    let coeffs: Vec<C64> = (0..dim).map(|k| vecs.column(k).iter().zip(psi0).map(|(v, p)| v.conj() * p).sum()).collect();
    let e0 = h.expectation(psi0);
    let scale = e0.abs().max(1.0);
    let mut recorder = Recorder::new(grid.len(), rec.spin_density, rec.snapshots);
    let mut energy_drift: f64 = 0.0;
    let mut x = vec![C64::new(0.0, 0.0); dim];
    for t in grid.times() {
        x.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        for (k, (&e, &c)) in vals.iter().zip(&coeffs).enumerate() {
            let w = c * C64::from_polar(1.0, -e * t);
            for (xi, v) in x.iter_mut().zip(vecs.column(k).iter()) {
                *xi += v * w;
            }
        }
        recorder.record(&x);
        energy_drift = energy_drift.max((h.expectation(&x) - e0).abs() / scale);
    }
    Ok(Trajectory {
        grid: *grid,
        model: Model::Generic,
        n_max: None,
        excited_population: recorder.excited,
        spin_density: recorder.rho,
        snapshots: recorder.snaps,
        final_state: x,
        conservation: Conservation {
            max_norm_error: recorder.max_norm_error,
            energy_drift: Some(energy_drift),
            ..Default::default()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::inner;
    use crate::model::{build_full_hamiltonian, coherent_amplitudes, Frame, JointState, ModelParams, Spin};
    use core::f64::consts::PI;
    use nalgebra::DMatrix;

    fn up() -> Vec<C64> {
        vec![C64::from(1.0), C64::from(0.0)]
    }

    #[test]
    fn semiclassical_rwa_is_cos_squared() {
        let a = 0.2;
        let g = SemiclassicalGenerator { params: SemiclassicalParams::resonant(a).unwrap(), coupling: Coupling::Rwa };
        let grid = TimeGrid::sampled(20.0 * PI / a).unwrap();
        let tr = evolve_time_dependent(&g, &up(), &grid, &StepControl::default(), Recording::default()).unwrap();
        let worst = grid
            .times()
            .zip(&tr.excited_population)
            .map(|(t, p)| (p - (a * t).cos().powi(2)).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-8, "{worst:e}");
    }

    #[test]
    fn step_order_is_four() {
        let g =
            SemiclassicalGenerator { params: SemiclassicalParams::resonant(0.3).unwrap(), coupling: Coupling::Full };
        let ctl = StepControl::default();
        let reference = advance(&g, 0.0, 3.0, 4096, &up(), &ctl).unwrap();
        let err = |s| {
            let y = advance(&g, 0.0, 3.0, s, &up(), &ctl).unwrap();
            norm(&y.iter().zip(&reference).map(|(a, b)| a - b).collect::<Vec<_>>())
        };
        let ratio = err(16) / err(32);
        assert!((ratio - 16.0).abs() < 2.0, "ratio {ratio}");
    }

    #[test]
    fn constant_generator_matches_eigen_evolution() {
        let p = ModelParams::resonant(0.3).unwrap();
        let h = build_full_hamiltonian(&p, 12).unwrap();
        let psi = JointState::product(Spin::Up, &coherent_amplitudes(0.8, 12).unwrap(), Frame::Lab).unwrap();
        let grid = TimeGrid::sampled(20.0).unwrap();
        let rec = Recording { spin_density: true, snapshots: true };
        let a =
            evolve_time_dependent(&ConstantGenerator(h.clone()), psi.amplitudes(), &grid, &StepControl::default(), rec)
                .unwrap();
        let b = evolve_time_independent(&h, psi.amplitudes(), &grid, rec).unwrap();
        let (sa, sb) = (a.snapshots.unwrap(), b.snapshots.unwrap());
        for (x, y) in sa.iter().zip(&sb) {
            let d = norm(&x.iter().zip(y).map(|(p, q)| p - q).collect::<Vec<_>>());
            assert!(d < 1e-9, "{d:e}");
        }
        assert!(b.conservation.max_norm_error < 1e-12);
        assert!(b.conservation.energy_drift.unwrap() < 1e-12);
    }

    #[test]
    fn diagonal_generator_keeps_population() {
        let mut m = DMatrix::from_element(4, 4, C64::from(0.0));
        for i in 0..4 {
            m[(i, i)] = C64::from(i as f64 - 1.5);
        }
        let h = HermitianOperator::new(m).unwrap();
        let psi = vec![C64::from(1.0), C64::from(0.0), C64::from(0.0), C64::from(0.0)];
        let tr = evolve_time_independent(&h, &psi, &TimeGrid::new(10.0, 50).unwrap(), Recording::default()).unwrap();
        assert!(tr.excited_population.iter().all(|p| (p - 1.0).abs() < 1e-14));
    }

    struct Reversed<'a, G> {
        inner: &'a G,
        t_end: f64,
    }

    impl<G: Generator> Generator for Reversed<'_, G> {
        fn dim(&self) -> usize {
            self.inner.dim()
        }
        fn apply_add(&self, t: f64, scale: f64, x: &[C64], y: &mut [C64]) {
            self.inner.apply_add(self.t_end - t, -scale, x, y)
        }
    }

    #[test]
    fn time_reversal_returns_initial_state() {
        let p = ModelParams::resonant(0.1).unwrap();
        let g = DisplacedGenerator::new(p, 2.0, 24, Coupling::Full).unwrap();
        let psi0 = JointState::basis(Spin::Up, 0, 24, Frame::DisplacedRotating).unwrap();
        let grid = TimeGrid::sampled(30.0).unwrap();
        let ctl = StepControl::default();
        let fwd = evolve_time_dependent(&g, psi0.amplitudes(), &grid, &ctl, Recording::default()).unwrap();
        let back = Reversed { inner: &g, t_end: grid.t_end() };
        let bwd = evolve_time_dependent(&back, &fwd.final_state, &grid, &ctl, Recording::default()).unwrap();
        let overlap = inner(psi0.amplitudes(), &bwd.final_state);
        assert!((overlap - C64::from(1.0)).norm() < 1e-6);
        assert!(fwd.conservation.max_norm_error < 1e-8);
    }

    #[test]
    fn fn_generator_agrees_with_semiclassical() {
        let params = SemiclassicalParams::resonant(0.2).unwrap();
        let sc = SemiclassicalGenerator { params, coupling: Coupling::Full };
        let f = FnGenerator { dim: 2, f: |t| crate::model::semiclassical_generator(&params, t, Coupling::Full) };
        let grid = TimeGrid::sampled(15.0).unwrap();
        let ctl = StepControl::default();
        let a = evolve_time_dependent(&sc, &up(), &grid, &ctl, Recording::default()).unwrap();
        let b = evolve_time_dependent(&f, &up(), &grid, &ctl, Recording::default()).unwrap();
        for (x, y) in a.excited_population.iter().zip(&b.excited_population) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let g = SemiclassicalGenerator { params: SemiclassicalParams::resonant(0.2).unwrap(), coupling: Coupling::Rwa };
        let grid = TimeGrid::new(1.0, 3).unwrap();
        assert!(
            evolve_time_dependent(&g, &[C64::from(1.0)], &grid, &StepControl::default(), Recording::default()).is_err()
        );
    }
}
