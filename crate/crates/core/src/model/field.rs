use alloc::format;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::C64;

/// Largest truncated Poisson weight accepted for a coherent state.
pub const MAX_TAIL_WEIGHT: f64 = 1e-10;

/// Lab-frame truncation for a coherent field: `ceil(alpha^2 + 10 alpha + 20)`.
pub fn lab_truncation(alpha: f64) -> usize {
    (alpha * alpha + 10.0 * alpha + 20.0).ceil() as usize
}

/// Starting truncation in the displaced frame; independent of `alpha`.
pub fn displaced_start_truncation() -> usize {
    64
}

pub(crate) fn log_poisson(alpha: f64, n: usize) -> f64 {
    let nf = n as f64;
    -alpha * alpha + 2.0 * nf * alpha.ln() - libm::lgamma(nf + 1.0)
}

/// Poisson weight of `|alpha>` above Fock number `n_max`.
pub fn tail_weight(alpha: f64, n_max: usize) -> f64 {
    if alpha == 0.0 {
        return 0.0;
    }
    let mut tail = 0.0;
    let mut n = n_max + 1;
    loop {
        let w = log_poisson(alpha, n).exp();
        tail += w;
        // past the mode the weights decay at least geometrically
        if (n as f64) > alpha * alpha && w < 1e-30 * tail.max(1e-300) {
            break;
        }
        if (n as f64) > alpha * alpha + 60.0 * alpha + 200.0 {
            break;
        }
        n += 1;
    }
    tail
}

/// Fock amplitudes `e^{-alpha^2/2} alpha^n / sqrt(n!)` of `|alpha>` for
/// real `alpha >= 0`, evaluated in log space and renormalised.
pub fn coherent_amplitudes(alpha: f64, n_max: usize) -> Result<Vec<C64>> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(invalid(format!("coherent amplitude must be real and non-negative, got {alpha}")));
    }
    if n_max < 1 {
        return Err(invalid("n_max must be at least 1"));
    }
    let tail = tail_weight(alpha, n_max);
    if tail > MAX_TAIL_WEIGHT {
        return Err(Error::Truncation {
            n_max,
            detail: format!("coherent state alpha = {alpha} loses weight {tail:e} above the cutoff"),
        });
    }
    let mut amps: Vec<C64> = (0..=n_max)
        .map(|n| {
            if alpha == 0.0 {
                C64::from(if n == 0 { 1.0 } else { 0.0 })
            } else {
                C64::from((0.5 * log_poisson(alpha, n)).exp())
            }
        })
        .collect();
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|z| *z /= norm);
    Ok(amps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum() {
        let c = coherent_amplitudes(0.0, 4).unwrap();
        assert_eq!(c[0], C64::new(1.0, 0.0));
        assert!(c[1..].iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn mean_photon_number_sqrt10() {
        let alpha = 10f64.sqrt();
        let c = coherent_amplitudes(alpha, lab_truncation(alpha)).unwrap();
        let mean: f64 = c.iter().enumerate().map(|(n, z)| n as f64 * z.norm_sqr()).sum();
        assert!((mean - 10.0).abs() < 1e-8, "mean {mean}");
    }

    #[test]
    fn poisson_weight_alpha_two() {
        let c = coherent_amplitudes(2.0, lab_truncation(2.0)).unwrap();
        let want = (-4f64).exp() * 256.0 / 24.0;
        assert!((c[4].norm_sqr() - want).abs() < 1e-14);
    }

    #[test]
    fn large_alpha_does_not_overflow() {
        let c = coherent_amplitudes(40.0, lab_truncation(40.0)).unwrap();
        assert!(c.iter().all(|z| z.re.is_finite()));
        let mean: f64 = c.iter().enumerate().map(|(n, z)| n as f64 * z.norm_sqr()).sum();
        assert!((mean - 1600.0).abs() < 1e-6);
    }

    #[test]
    fn insufficient_cutoff_is_reported() {
        assert!(matches!(coherent_amplitudes(5.0, 20), Err(Error::Truncation { .. })));
    }
}
