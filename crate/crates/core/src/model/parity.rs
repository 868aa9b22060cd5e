use alloc::vec;

use nalgebra::DMatrix;
use num_traits::Float;

use super::{Branch, Frame, JointState, ModelParams, Parity, Spin};
use crate::error::{invalid, Error, Result};
use crate::C64;

/// `<sigma_z (-1)^{a^dag a}>`; only meaningful in the lab frame.
pub fn parity_expectation(state: &JointState) -> Result<f64> {
    if state.frame() != Frame::Lab {
        return Err(Error::WrongFrame);
    }
    let mut acc = 0.0;
    for spin in [Spin::Up, Spin::Down] {
        for (n, z) in state.spin_block(spin).iter().enumerate() {
            acc += Parity::of(spin, n).value() as f64 * z.norm_sqr();
        }
    }
    Ok(acc)
}

/// Dense diagonal parity operator.
pub fn parity_operator(n_max: usize) -> Result<DMatrix<C64>> {
    if n_max < 1 {
        return Err(invalid("n_max must be at least 1"));
    }
    let dim = 2 * (n_max + 1);
    let mut m = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
    for spin in [Spin::Up, Spin::Down] {
        for n in 0..=n_max {
            let i = JointState::index(n_max, spin, n);
            m[(i, i)] = C64::from(Parity::of(spin, n).value() as f64);
        }
    }
    Ok(m)
}

/// `<a^dag a + sigma_+ sigma_->`.
pub fn excitation_expectation(state: &JointState) -> f64 {
    let up: f64 = state.spin_block(Spin::Up).iter().enumerate().map(|(n, z)| (n + 1) as f64 * z.norm_sqr()).sum();
    let down: f64 = state.spin_block(Spin::Down).iter().enumerate().map(|(n, z)| n as f64 * z.norm_sqr()).sum();
    up + down
}

/// `<f(a^dag a)>` for a function of the photon number.
pub fn number_moment(state: &JointState, f: impl Fn(f64) -> f64) -> f64 {
    [Spin::Up, Spin::Down]
        .iter()
        .flat_map(|&s| state.spin_block(s).iter().enumerate())
        .map(|(n, z)| f(n as f64) * z.norm_sqr())
        .sum()
}

/// RWA doublet energy `(n+1) omega0 +/- lambda sqrt(n+1)` at resonance.
///
/// This counts the field zero-point energy `omega0/2`; eigenvalues of
/// [`build_rwa_hamiltonian`](super::build_rwa_hamiltonian) are lower by
/// exactly `omega0/2`.
pub fn rwa_energy(n: usize, branch: Branch, params: &ModelParams) -> f64 {
    let m = (n + 1) as f64;
    m * params.omega0 + branch.sign() * params.lambda * m.sqrt()
}

/// Resonant RWA eigenpair `(|n,+z> +/- |n+1,-z>)/sqrt(2)`, the sign following
/// the branch. Returns the energy of [`rwa_energy`].
pub fn rwa_eigenpair(n: usize, branch: Branch, params: &ModelParams, n_max: usize) -> Result<(f64, JointState)> {
    if !params.is_resonant() {
        return Err(invalid("RWA eigenpairs in closed form require Omega = omega0"));
    }
    if n + 1 > n_max {
        return Err(invalid("n_max must exceed the doublet index"));
    }
    let mut amps = vec![C64::new(0.0, 0.0); 2 * (n_max + 1)];
    let r = core::f64::consts::FRAC_1_SQRT_2;
    amps[JointState::index(n_max, Spin::Up, n)] = C64::from(r);
    amps[JointState::index(n_max, Spin::Down, n + 1)] = C64::from(branch.sign() * r);
    Ok((rwa_energy(n, branch, params), JointState::new(amps, Frame::Lab, n_max)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_of_basis_states() {
        let up0 = JointState::basis(Spin::Up, 0, 3, Frame::Lab).unwrap();
        let down1 = JointState::basis(Spin::Down, 1, 3, Frame::Lab).unwrap();
        assert_eq!(parity_expectation(&up0).unwrap(), 1.0);
        assert_eq!(parity_expectation(&down1).unwrap(), 1.0);
    }

    #[test]
    fn parity_rejects_displaced_frame() {
        let s = JointState::basis(Spin::Up, 0, 3, Frame::DisplacedRotating).unwrap();
        assert_eq!(parity_expectation(&s), Err(Error::WrongFrame));
    }

    #[test]
    fn rwa_eigenpairs_have_definite_parity() {
        let p = ModelParams::resonant(0.2).unwrap();
        for n in 0..6 {
            for b in [Branch::Plus, Branch::Minus] {
                let (_, s) = rwa_eigenpair(n, b, &p, 8).unwrap();
                assert!((s.norm() - 1.0).abs() < 1e-15);
                let want = if n % 2 == 0 { 1.0 } else { -1.0 };
                assert!((parity_expectation(&s).unwrap() - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn rwa_energy_values() {
        let p = ModelParams::resonant(0.2).unwrap();
        assert!((rwa_energy(3, Branch::Plus, &p) - 4.4).abs() < 1e-15);
        let p = ModelParams::resonant(0.1).unwrap();
        assert!((rwa_energy(0, Branch::Minus, &p) - 0.9).abs() < 1e-15);
        assert!((rwa_energy(0, Branch::Plus, &p) - 1.1).abs() < 1e-15);
    }

    #[test]
    fn rwa_eigenpair_preconditions() {
        let off = ModelParams::new(1.0, 1.2, 0.1).unwrap();
        assert!(rwa_eigenpair(0, Branch::Plus, &off, 4).is_err());
        let p = ModelParams::resonant(0.1).unwrap();
        assert!(rwa_eigenpair(4, Branch::Plus, &p, 4).is_err());
    }

    #[test]
    fn excitation_number_of_product_state() {
        let s = JointState::basis(Spin::Up, 2, 4, Frame::Lab).unwrap();
        assert_eq!(excitation_expectation(&s), 3.0);
        assert_eq!(number_moment(&s, |n| n * n), 4.0);
    }
}
