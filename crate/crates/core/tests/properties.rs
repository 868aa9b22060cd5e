use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rabi_core::dynamics::{run_quantum, run_semiclassical, FrameChoice, RunOptions, TimeGrid};
use rabi_core::linalg::inner;
use rabi_core::metrics::{norm_difference, pure_trace_distance, trace_distance};
use rabi_core::model::{
    build_displaced_generator, build_full_hamiltonian, build_rwa_hamiltonian, parity_operator, rwa_energy, Branch,
    Coupling, FieldSpec, ModelParams, Parity, RabiChain, SemiclassicalParams,
};
use rabi_core::spectrum::lambda_c_rwa;

fn complex_vec(len: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
        .prop_map(|v| v.into_iter().map(|(a, b)| C64::new(a, b)).collect())
}

fn normalized(len: usize) -> impl Strategy<Value = Vec<C64>> {
    complex_vec(len).prop_filter_map("zero vector", |v| {
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        (n > 1e-3).then(|| v.into_iter().map(|z| z / n).collect())
    })
}

fn density(dim: usize) -> impl Strategy<Value = DMatrix<C64>> {
    complex_vec(dim * dim).prop_filter_map("singular", move |v| {
        let a = DMatrix::from_vec(dim, dim, v);
        let rho = &a * a.adjoint();
        let tr = rho.trace().re;
        (tr > 1e-6).then(|| rho / C64::from(tr))
    })
}

fn unitary(dim: usize) -> impl Strategy<Value = DMatrix<C64>> {
    complex_vec(dim * dim).prop_map(move |v| DMatrix::from_vec(dim, dim, v).qr().q())
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_distance_triangle(a in density(3), b in density(3), c in density(3)) {
        let ab = trace_distance(&a, &b).unwrap();
        let bc = trace_distance(&b, &c).unwrap();
        let ac = trace_distance(&a, &c).unwrap();
        prop_assert!(ac <= ab + bc + 1e-10);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&ab));
    }

    #[test]
    fn trace_distance_unitarily_invariant(a in density(4), b in density(4), u in unitary(4)) {
        let ua = &u * &a * u.adjoint();
        let ub = &u * &b * u.adjoint();
        let d0 = trace_distance(&a, &b).unwrap();
        let d1 = trace_distance(&ua, &ub).unwrap();
        prop_assert!((d0 - d1).abs() < 1e-10);
    }

    #[test]
    fn norm_difference_identity(x in normalized(6), y in normalized(6)) {
        let direct = norm_difference(&x, &y).unwrap();
        let identity = (2.0 * (1.0 - inner(&x, &y).re)).max(0.0).sqrt();
        prop_assert!((direct - identity).abs() < 1e-12);
        prop_assert!(direct <= 2.0 + 1e-12);
    }

    #[test]
    fn pure_distance_matches_density_form(x in normalized(3), y in normalized(3)) {
        let outer = |v: &[C64]| DMatrix::from_fn(3, 3, |i, j| v[i] * v[j].conj());
        let d = trace_distance(&outer(&x), &outer(&y)).unwrap();
        prop_assert!((d - pure_trace_distance(&x, &y).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn hamiltonians_hermitian_and_symmetric(lambda in 0.0f64..2.0, n_max in 1usize..24) {
        let p = ModelParams::resonant(lambda).unwrap();
        let full = build_full_hamiltonian(&p, n_max).unwrap();
        let rwa = build_rwa_hamiltonian(&p, n_max).unwrap();
        prop_assert!(full.max_hermitian_deviation() < 1e-12);
        let pi = parity_operator(n_max).unwrap();
        prop_assert!(full.commutator_norm(&pi) < 1e-12);
        let dim = 2 * (n_max + 1);
        let exc = DMatrix::from_fn(dim, dim, |i, j| {
            if i != j { C64::new(0.0, 0.0) } else if i <= n_max { C64::from(i as f64 + 1.0) } else { C64::from((i - n_max - 1) as f64) }
        });
        prop_assert!(rwa.commutator_norm(&exc) < 1e-12);
    }

    #[test]
    fn displaced_generator_hermitian(lambda in 0.0f64..0.5, alpha in 0.0f64..50.0, t in 0.0f64..100.0) {
        let p = ModelParams::resonant(lambda).unwrap();
        for coupling in [Coupling::Full, Coupling::Rwa] {
            let g = build_displaced_generator(&p, alpha, 12, t, coupling).unwrap();
            prop_assert!(max_abs(&(g.matrix() - g.matrix().adjoint())) < 1e-12);
        }
    }

    #[test]
    fn sector_levels_never_cross(lambda in 0.0f64..1.5) {
        let p = ModelParams::resonant(lambda).unwrap();
        for parity in [Parity::Even, Parity::Odd] {
            let vals = RabiChain::new(p, parity, Coupling::Full, 80).unwrap().tridiagonal().eigenvalues().unwrap();
            prop_assert!(vals.windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn rwa_crossing_identity(n in 1usize..10_000) {
        let lc = lambda_c_rwa(n, 1.0);
        let nf = n as f64;
        prop_assert!((lc * (nf.sqrt() + (nf + 1.0).sqrt()) - 1.0).abs() < 1e-12);
        let p = ModelParams::resonant(lc).unwrap();
        // lambda_c(n) is where the pair with n excitations meets the next one down:
        // E_{n-1,+} = E_{n,-} in the pair labelling of `rwa_energy`
        let gap = rwa_energy(n - 1, Branch::Plus, &p) - rwa_energy(n, Branch::Minus, &p);
        prop_assert!(gap.abs() < 1e-12 * (nf + 2.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn trajectories_are_physical(lambda in 0.0f64..0.3, alpha in 0.0f64..3.0, a in 0.0f64..0.4) {
        let grid = TimeGrid::sampled(40.0).unwrap();
        let opts = RunOptions::default();
        let p = ModelParams::resonant(lambda).unwrap();
        let q = run_quantum(&p, FieldSpec::coherent(alpha).unwrap(), Coupling::Full, FrameChoice::Lab, &grid, &opts).unwrap();
        let s = run_semiclassical(&SemiclassicalParams::resonant(a).unwrap(), Coupling::Full, &grid, &opts).unwrap();
        for tr in [&q, &s] {
            prop_assert!(tr.conservation.max_norm_error < 1e-8);
            for (pop, rho) in tr.excited_population.iter().zip(&tr.spin_density) {
                prop_assert!((-1e-12..=1.0 + 1e-12).contains(pop));
                let trace = rho[0][0].re + rho[1][1].re;
                prop_assert!((trace - 1.0).abs() < 1e-8);
                let det = rho[0][0].re * rho[1][1].re - rho[0][1].norm_sqr();
                let low = 0.5 * (trace - (trace * trace - 4.0 * det).max(0.0).sqrt());
                prop_assert!(low > -1e-8);
            }
        }
        prop_assert!(q.conservation.energy_drift.unwrap() < 1e-8);
        prop_assert!(q.conservation.parity_drift.unwrap() < 1e-8);
    }
}
