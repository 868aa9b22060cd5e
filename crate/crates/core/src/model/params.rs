use alloc::format;

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Field frequency.
    pub omega0: f64,
    /// Spin splitting.
    pub omega: f64,
    /// Spin-field coupling.
    pub lambda: f64,
}

impl ModelParams {
    pub fn new(omega0: f64, omega: f64, lambda: f64) -> Result<Self> {
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(invalid(format!("omega0 must be positive, got {omega0}")));
        }
        if !(omega.is_finite() && omega > 0.0) {
            return Err(invalid(format!("Omega must be positive, got {omega}")));
        }
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(invalid(format!("lambda must be non-negative, got {lambda}")));
        }
        Ok(Self { omega0, omega, lambda })
    }

    /// `omega0 = Omega = 1`.
    pub fn resonant(lambda: f64) -> Result<Self> {
        Self::new(1.0, 1.0, lambda)
    }

    pub fn is_resonant(&self) -> bool {
        self.omega == self.omega0
    }

    pub fn with_lambda(self, lambda: f64) -> Result<Self> {
        Self::new(self.omega0, self.omega, lambda)
    }
}

/// Classical drive of amplitude `A` at frequency `omega0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiclassicalParams {
    pub amplitude: f64,
    pub omega0: f64,
    pub omega: f64,
}

impl SemiclassicalParams {
    pub fn new(amplitude: f64, omega0: f64, omega: f64) -> Result<Self> {
        if !(amplitude.is_finite() && amplitude >= 0.0) {
            return Err(invalid(format!("drive amplitude must be non-negative, got {amplitude}")));
        }
        ModelParams::new(omega0, omega, 0.0)?;
        Ok(Self { amplitude, omega0, omega })
    }

    pub fn resonant(amplitude: f64) -> Result<Self> {
        Self::new(amplitude, 1.0, 1.0)
    }

    /// The semiclassical partner of a coherent-state quantum model, `A = lambda alpha`.
    pub fn from_quantum(params: &ModelParams, alpha: f64) -> Result<Self> {
        Self::new(params.lambda * alpha, params.omega0, params.omega)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldSpec {
    Fock(usize),
    /// Real, non-negative coherent amplitude.
    Coherent(f64),
}

impl FieldSpec {
    pub fn coherent(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(invalid(format!("coherent amplitude must be real and non-negative, got {alpha}")));
        }
        Ok(Self::Coherent(alpha))
    }

    pub fn mean_photon_number(&self) -> f64 {
        match *self {
            FieldSpec::Fock(n) => n as f64,
            FieldSpec::Coherent(alpha) => alpha * alpha,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Frame {
    Lab,
    /// Rotating at `omega0` with respect to the field and expressed in the
    /// displaced Fock basis `D(alpha)|n>`.
    DisplacedRotating,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    /// `|+z>`, the excited state.
    Up,
    /// `|-z>`.
    Down,
}

impl Spin {
    pub fn sign(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }
}

/// Upper (`Plus`) or lower (`Minus`) member of an RWA doublet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Branch::Plus => '+',
            Branch::Minus => '-',
        }
    }
}

/// Full Rabi coupling or its rotating-wave truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coupling {
    Full,
    Rwa,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(ModelParams::new(0.0, 1.0, 0.1).is_err());
        assert!(ModelParams::new(1.0, -1.0, 0.1).is_err());
        assert!(ModelParams::new(1.0, 1.0, -0.1).is_err());
        assert!(ModelParams::resonant(0.0).unwrap().is_resonant());
        assert!(SemiclassicalParams::resonant(-0.2).is_err());
        assert!(FieldSpec::coherent(-1.0).is_err());
        assert!(FieldSpec::coherent(f64::NAN).is_err());
    }

    #[test]
    fn coherent_mean_photon_number() {
        let f = FieldSpec::coherent(3.0).unwrap();
        assert_eq!(f.mean_photon_number(), 9.0);
        assert_eq!(FieldSpec::Fock(4).mean_photon_number(), 4.0);
    }

    #[test]
    fn semiclassical_amplitude_is_product() {
        let p = ModelParams::resonant(0.02).unwrap();
        let sc = SemiclassicalParams::from_quantum(&p, 10.0).unwrap();
        assert!((sc.amplitude - 0.2).abs() < 1e-15);
    }
}
