//! Amplitude spectra of sampled populations.
//!
//! Conventions are fixed so that spectra, and the correlations computed from
//! them, are reproducible: the series mean is removed, the window is
//! rectangular, the series is zero-padded to the next power of two at least
//! four times its length, and amplitudes are `|X_k| / len` on the angular axis
//! `omega_k = 2 pi k / (N_pad dt)` up to the Nyquist frequency.

use std::f64::consts::PI;

use rabi_core::dynamics::Trajectory;
use rabi_core::metrics::FourierSpectrum;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{config, Result};

pub const MIN_SAMPLES: usize = 256;
pub const PAD_FACTOR: usize = 4;

/// Relative tolerance on sample spacing for [`fft_spectrum_at`].
pub const UNIFORM_TOL: f64 = 1e-9;

pub fn padded_len(len: usize) -> usize {
    (PAD_FACTOR * len).next_power_of_two()
}

pub fn fft_spectrum(series: &[f64], dt: f64) -> Result<FourierSpectrum> {
    if series.len() < MIN_SAMPLES {
        return Err(config(format!("spectrum needs at least {MIN_SAMPLES} samples, got {}", series.len())));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(config("sample spacing must be positive"));
    }
    if series.iter().any(|x| !x.is_finite()) {
        return Err(config("series contains non-finite values"));
    }
    let len = series.len();
    let n_pad = padded_len(len);
    let mean = series.iter().sum::<f64>() / len as f64;
    let mut buf: Vec<Complex<f64>> = series.iter().map(|&x| Complex::new(x - mean, 0.0)).collect();
    buf.resize(n_pad, Complex::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(n_pad).process(&mut buf);
    let scale = 1.0 / len as f64;
    let amplitudes = buf[..=n_pad / 2].iter().map(|z| z.norm() * scale).collect();
    let horizon = (len - 1) as f64 * dt;
    Ok(FourierSpectrum::new(2.0 * PI / (n_pad as f64 * dt), amplitudes, horizon, dt, true)?)
}

/// As [`fft_spectrum`], taking explicit sample times and rejecting a grid
/// that is not uniform.
pub fn fft_spectrum_at(times: &[f64], series: &[f64]) -> Result<FourierSpectrum> {
    if times.len() != series.len() {
        return Err(config(format!("{} times for {} samples", times.len(), series.len())));
    }
    if times.len() < 2 {
        return Err(config("need at least two samples"));
    }
    let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    let uniform = times.windows(2).all(|w| ((w[1] - w[0]) - dt).abs() <= UNIFORM_TOL * dt.abs());
    if !uniform {
        return Err(config("samples are not uniformly spaced"));
    }
    fft_spectrum(series, dt)
}

pub fn trajectory_spectrum(tr: &Trajectory) -> Result<FourierSpectrum> {
    fft_spectrum(&tr.excited_population, tr.grid.dt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinusoid_peaks_at_its_frequency() {
        let dt = 2.0 * PI / 64.0;
        let xs: Vec<f64> = (0..4096).map(|k| (0.4 * k as f64 * dt).cos()).collect();
        let s = fft_spectrum(&xs, dt).unwrap();
        let peak = s.omega(s.peak_above(0.0));
        assert!((peak - 0.4).abs() <= s.d_omega, "{peak}");
        assert_eq!(s.amplitudes.len(), padded_len(4096) / 2 + 1);
        // Nyquist bin sits at pi / dt
        assert!((s.omega(s.amplitudes.len() - 1) - PI / dt).abs() < 1e-12);
    }

    #[test]
    fn padding_is_next_power_of_two() {
        assert_eq!(padded_len(256), 1024);
        assert_eq!(padded_len(300), 2048);
        assert_eq!(padded_len(1000), 4096);
    }

    #[test]
    fn constant_series_has_no_spectrum() {
        let s = fft_spectrum(&[0.7; 300], 0.1).unwrap();
        let worst = s.amplitudes.iter().cloned().fold(0.0, f64::max);
        // only the rounding of the mean survives
        assert!(worst < 1e-13, "{worst:e}");
    }

    #[test]
    fn short_and_irregular_input_rejected() {
        assert!(fft_spectrum(&[0.0; 255], 0.1).is_err());
        let mut t: Vec<f64> = (0..400).map(|k| k as f64 * 0.1).collect();
        let x = vec![0.0; 400];
        assert!(fft_spectrum_at(&t, &x).is_ok());
        t[200] += 0.01;
        assert!(fft_spectrum_at(&t, &x).is_err());
    }

    #[test]
    fn parseval_on_padded_transform() {
        let xs: Vec<f64> = (0..512).map(|k| ((k * 7919) % 101) as f64 / 101.0).collect();
        let s = fft_spectrum(&xs, 1.0).unwrap();
        let n_pad = padded_len(xs.len()) as f64;
        let mean = xs.iter().sum::<f64>() / 512.0;
        let energy: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
        // one-sided sum: interior bins count twice
        let last = s.amplitudes.len() - 1;
        let spec: f64 = s
            .amplitudes
            .iter()
            .enumerate()
            .map(|(k, a)| (a * 512.0).powi(2) * if k == 0 || k == last { 1.0 } else { 2.0 })
            .sum::<f64>()
            / n_pad;
        assert!((spec - energy).abs() < 1e-9 * energy);
    }
}
