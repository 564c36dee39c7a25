//! Scattering modes: an incident plane wave plus the field the sample scatters.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::green::sphere::{RadialSource, SeriesSpec};
use crate::green::{Geometry, GreenError, GreenFunction, Region};
use crate::numerics::linalg::{cross3, dot3, norm3, normalize3, scale3, Complex3Dyadic, Complex3Vector, Vec3};
use crate::numerics::SolidAngle;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModeError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Green(#[from] GreenError),
}

/// Incident plane wave `e^{ik n·r} e_{nν}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWaveLabel {
    pub omega: f64,
    pub n: Vec3,
    /// Polarization index, 1 or 2.
    pub nu: u8,
}

impl PlaneWaveLabel {
    pub fn new(omega: f64, n: Vec3, nu: u8) -> Result<Self, ModeError> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(ModeError::InvalidArgument(format!("omega must be positive, got {omega}")));
        }
        if !(nu == 1 || nu == 2) {
            return Err(ModeError::InvalidArgument(format!("polarization index must be 1 or 2, got {nu}")));
        }
        polarization_basis(n)?;
        Ok(Self { omega, n, nu })
    }

    pub fn polarization(&self) -> Vec3 {
        let (e1, e2) = polarization_basis(self.n).expect("validated direction");
        if self.nu == 1 {
            e1
        } else {
            e2
        }
    }
}

/// Right-handed `(e1, e2, n)` with `e1 ∝ ẑ × n`, falling back to `x̂ × n` near the poles.
pub fn polarization_basis(n: Vec3) -> Result<(Vec3, Vec3), ModeError> {
    if !((norm3(n) - 1.0).abs() <= 1e-10) {
        return Err(ModeError::InvalidArgument(format!("direction must be a unit vector, |n| = {}", norm3(n))));
    }
    let z = cross3([0.0, 0.0, 1.0], n);
    let seed = if norm3(z) > 1e-6 { z } else { cross3([1.0, 0.0, 0.0], n) };
    let e1 = normalize3(seed).expect("nonzero seed");
    Ok((e1, cross3(n, e1)))
}

pub fn incident_wave(label: &PlaneWaveLabel, k0: f64, r: Vec3) -> Complex3Vector {
    let phase = Complex64::new(0.0, k0 * dot3(label.n, r)).exp();
    Complex3Vector::from_real(label.polarization()).scale(phase)
}

/// A scattering mode bound to a frequency-fixed Green's function (sharing its coefficients).
#[derive(Debug, Clone)]
pub struct ScatteringMode {
    pub label: PlaneWaveLabel,
    green: GreenFunction,
}

impl ScatteringMode {
    pub fn new(geometry: &Geometry, label: PlaneWaveLabel) -> Result<Self, ModeError> {
        Self::with_green(GreenFunction::new(geometry, label.omega)?, label)
    }

    /// Reuses an existing Green's function at the label's frequency.
    pub fn with_green(green: GreenFunction, label: PlaneWaveLabel) -> Result<Self, ModeError> {
        if matches!(green.geometry(), Geometry::Homogeneous { .. }) {
            return Err(ModeError::InvalidArgument("scattering modes need a vacuum background".into()));
        }
        if green.omega() != label.omega {
            return Err(ModeError::InvalidArgument("label frequency differs from the Green's function".into()));
        }
        Ok(Self { label, green })
    }

    pub fn geometry(&self) -> &Geometry {
        self.green.geometry()
    }

    pub fn incident(&self, r: Vec3) -> Complex3Vector {
        incident_wave(&self.label, self.green.k0(), r)
    }

    fn series(&self, left: RadialSource, field: Region) -> Result<Option<Complex3Vector>, ModeError> {
        let d = series_dyadic(&self.green, self.label.n, left, field)?;
        Ok(d.map(|d| d.apply(&Complex3Vector::from_real(self.label.polarization()))))
    }

    /// `F⁽ˢ⁾(r)`: incident plus scattered outside, transmitted series inside.
    pub fn eval(&self, r: Vec3) -> Result<Complex3Vector, ModeError> {
        let region = self.green.region(r)?;
        let k0 = Complex64::new(self.green.k0(), 0.0);
        Ok(match region {
            Region::Outside => {
                let sc = self.series(RadialSource::Outgoing { k: k0, r }, Region::Outside)?;
                self.incident(r) + sc.unwrap_or_else(Complex3Vector::zero)
            }
            Region::Inside => {
                let k1 = self.green.sphere().map(|c| c.k1).unwrap_or(k0);
                match self.series(RadialSource::Regular { k: k1, r }, Region::Inside)? {
                    Some(f) => f,
                    None => self.incident(r),
                }
            }
        })
    }

    /// `F⁽ˢᶜ⁾ = F⁽ˢ⁾ − F⁽ⁱⁿ⁾`, defined in both regions.
    pub fn scattered(&self, r: Vec3) -> Result<Complex3Vector, ModeError> {
        Ok(self.eval(r)? - self.incident(r))
    }

    /// `w⁽ˢᶜ⁾(o)`: coefficient of `e^{ikr}/r` in the scattered field.
    pub fn scattered_farfield(&self, o: &SolidAngle) -> Result<Complex3Vector, ModeError> {
        let left = RadialSource::FarField { k: self.green.k0(), dir: o.unit_vector() };
        Ok(self.series(left, Region::Outside)?.unwrap_or_else(Complex3Vector::zero))
    }
}

/// Plane-wave Mie series with the polarization left open; `None` without a scatterer.
fn series_dyadic(
    green: &GreenFunction,
    n: Vec3,
    left: RadialSource,
    field: Region,
) -> Result<Option<Complex3Dyadic>, ModeError> {
    let Some(c) = green.sphere().filter(|_| green.scatters()) else {
        return Ok(None);
    };
    let (cm, cn) = match field {
        Region::Outside => (&c.a_m, &c.a_n),
        Region::Inside => (&c.t_m, &c.t_n),
    };
    let series = SeriesSpec {
        pref: Complex64::new(1.0, 0.0),
        coef_m: cm,
        coef_n: cn,
        left,
        right: RadialSource::PlaneWave { dir: n },
    };
    // The incident field has unit amplitude, which sets the convergence floor.
    let floor = if field == Region::Outside { 1.0 } else { 0.0 };
    Ok(Some(series.sum(c.initial_order(), false, [floor, 0.0, 0.0])?.value))
}

/// `D(r)` with `F⁽ˢ⁾_{nν}(r) = D(r)·e_{nν}` for both polarizations of incidence `n`.
pub fn mode_dyadic(green: &GreenFunction, n: Vec3, r: Vec3) -> Result<Complex3Dyadic, ModeError> {
    polarization_basis(n)?;
    let k0 = green.k0();
    let plane = || Complex3Dyadic::identity().scale(Complex64::new(0.0, k0 * dot3(n, r)).exp());
    Ok(match green.region(r)? {
        Region::Outside => {
            let left = RadialSource::Outgoing { k: Complex64::new(k0, 0.0), r };
            match series_dyadic(green, n, left, Region::Outside)? {
                Some(d) => d + plane(),
                None => plane(),
            }
        }
        Region::Inside => {
            let k1 = green.sphere().map(|c| c.k1).unwrap_or(Complex64::new(k0, 0.0));
            series_dyadic(green, n, RadialSource::Regular { k: k1, r }, Region::Inside)?.unwrap_or_else(plane)
        }
    })
}

pub fn scattering_mode_eval(mode: &ScatteringMode, r: Vec3) -> Result<Complex3Vector, ModeError> {
    mode.eval(r)
}

pub fn scattered_farfield(mode: &ScatteringMode, o: &SolidAngle) -> Result<Complex3Vector, ModeError> {
    mode.scattered_farfield(o)
}

/// `4π e_{nν} · 𝒲(o_{−n}, r)`: the field of a dipole along `e_{nν}` placed infinitely
/// far away in the direction `−n`.
pub fn mode_from_farfield(green: &GreenFunction, label: &PlaneWaveLabel, r: Vec3) -> Result<Complex3Vector, ModeError> {
    let back = SolidAngle::from_vector(scale3(-1.0, label.n)).map_err(GreenError::from)?;
    let w = green.farfield(&back, r)?.W;
    Ok(w.left_apply_real(label.polarization()).scale(Complex64::new(4.0 * PI, 0.0)))
}
