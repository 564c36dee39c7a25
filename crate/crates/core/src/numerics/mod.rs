//! Linear algebra, special functions and quadrature.

pub mod bessel;
pub mod linalg;
pub mod quadrature;
pub mod regularized;
pub mod sphere;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bessel::{spherical_bessel_jh, SphericalBessel};
pub use linalg::{relative_residual, Complex3Dyadic, Complex3Vector, Vec3};
pub use quadrature::{gauss_legendre, integrate_adaptive, AdaptiveOptions, QuadValue};
pub use regularized::{
    line_integrate_regularized, line_integrate_regularized_with, richardson_to_zero, LineOptions,
    RegularizedIntegral,
};
pub use sphere::{sphere_quadrature, SolidAngle, SphereRule};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("convergence failure: {message}")]
    ConvergenceFailure { message: String, partial: Vec<f64> },
}

/// SI constants (CODATA 2018 values for `c`, `μ0`, `ħ`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub c: f64,
    pub eps0: f64,
    pub mu0: f64,
    pub hbar: f64,
}

impl PhysicalConstants {
    /// `eps0` is derived from `mu0` and `c` so that `c² ε0 μ0 = 1` holds to rounding.
    pub fn si() -> Self {
        let c = 299_792_458.0;
        let mu0 = 1.256_637_062_12e-6;
        Self { c, eps0: 1.0 / (mu0 * c * c), mu0, hbar: 1.054_571_817e-34 }
    }

    /// Vacuum wavenumber `ω / c`.
    pub fn wavenumber(&self, omega: f64) -> f64 {
        omega / self.c
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::si()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_are_consistent() {
        let k = PhysicalConstants::si();
        assert!((k.c * k.c * k.eps0 * k.mu0 - 1.0).abs() < 1e-14);
        assert!((k.eps0 - 8.854_187_812_8e-12).abs() < 1e-20);
    }
}
