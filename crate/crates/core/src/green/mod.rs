//! Dyadic Green's function, its curls, the far-field amplitude and the loss-weighted
//! auxiliary dyadics for vacuum, a homogeneous medium, or a sphere in vacuum.

pub mod closed_form;
pub mod kernels;
pub mod sphere;

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dispersion::{DispersionError, Material};
use crate::numerics::linalg::{dot3, norm3, sub3, Complex3Dyadic, Vec3};
use crate::numerics::{NumericsError, PhysicalConstants, SolidAngle};

pub use closed_form::{medium_index, ClosedForm};
pub use sphere::{Region, SphereCoefficients};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GreenError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("field and source points coincide")]
    Coincidence,
    #[error("point {point:?} lies on the sphere surface")]
    SurfaceAmbiguity { point: Vec3 },
    #[error("series not converged at order {order} (last relative increment {last_increment:e})")]
    Truncation { order: usize, last_increment: f64 },
    #[error("no far-field amplitude in an unbounded lossy medium")]
    NoFarField,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Dispersion(#[from] DispersionError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Geometry {
    Vacuum,
    Homogeneous { material: Material },
    /// Sphere of `radius` (m) centred at the origin.
    SphereInVacuum { radius: f64, material: Material },
}

impl Geometry {
    pub fn validate(&self) -> Result<(), GreenError> {
        match self {
            Geometry::Vacuum => Ok(()),
            Geometry::Homogeneous { material } => Ok(material.validate()?),
            Geometry::SphereInVacuum { radius, material } => {
                if !(*radius > 0.0) || !radius.is_finite() {
                    return Err(GreenError::InvalidArgument(format!("sphere radius must be positive, got {radius}")));
                }
                Ok(material.validate()?)
            }
        }
    }

    pub fn radius(&self) -> Option<f64> {
        match self {
            Geometry::SphereInVacuum { radius, .. } => Some(*radius),
            _ => None,
        }
    }

    pub fn material(&self) -> Option<&Material> {
        match self {
            Geometry::Vacuum => None,
            Geometry::Homogeneous { material } | Geometry::SphereInVacuum { material, .. } => Some(material),
        }
    }
}

/// `𝒢(r, r′)`, `∇_r × 𝒢` and `𝒢 × ∇̄_{r′}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenEval {
    pub value: Complex3Dyadic,
    pub curl_r: Complex3Dyadic,
    pub curl_rprime: Complex3Dyadic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[allow(non_snake_case)]
pub struct FarFieldAmplitude {
    pub W: Complex3Dyadic,
    pub direction: SolidAngle,
}

#[derive(Debug, Clone)]
enum Scene {
    Closed(ClosedForm),
    Sphere { coefficients: Arc<SphereCoefficients>, interior: Option<ClosedForm>, eps: Complex64, mu: Complex64 },
}

/// A geometry frozen at one frequency. Sphere coefficients are built once and shared.
#[derive(Debug, Clone)]
pub struct GreenFunction {
    geometry: Geometry,
    omega: f64,
    constants: PhysicalConstants,
    k0: f64,
    scene: Scene,
}

impl GreenFunction {
    pub fn new(geometry: &Geometry, omega: f64) -> Result<Self, GreenError> {
        Self::with_constants(geometry, omega, PhysicalConstants::si())
    }

    pub fn with_constants(geometry: &Geometry, omega: f64, constants: PhysicalConstants) -> Result<Self, GreenError> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(GreenError::InvalidArgument(format!("omega must be positive, got {omega}")));
        }
        geometry.validate()?;
        let k0 = constants.wavenumber(omega);
        let w = Complex64::new(omega, 0.0);
        let scene = match geometry {
            Geometry::Vacuum => Scene::Closed(ClosedForm::vacuum(k0)),
            Geometry::Homogeneous { material } => {
                Scene::Closed(ClosedForm::medium(k0, material.epsilon_at(w), material.mu_at(w)))
            }
            Geometry::SphereInVacuum { radius, material } => {
                let (eps, mu) = (material.epsilon_at(w), material.mu_at(w));
                let inner = ClosedForm::medium(k0, eps, mu);
                let coefficients = Arc::new(SphereCoefficients::new(*radius, k0, inner.k, mu)?);
                // A vacuum-filled sphere is no scatterer; every region pair is the closed form.
                let interior = if material.is_vacuum() { None } else { Some(inner) };
                Scene::Sphere { coefficients, interior, eps, mu }
            }
        };
        Ok(Self { geometry: geometry.clone(), omega, constants, k0, scene })
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }

    pub fn sphere(&self) -> Option<&SphereCoefficients> {
        match &self.scene {
            Scene::Sphere { coefficients, .. } => Some(coefficients),
            Scene::Closed(_) => None,
        }
    }

    /// Whether the sphere carries a non-vacuum material.
    pub fn scatters(&self) -> bool {
        matches!(self.scene, Scene::Sphere { interior: Some(_), .. })
    }

    /// Region of `p`; homogeneous and vacuum scenes count as outside everywhere.
    pub fn region(&self, p: Vec3) -> Result<Region, GreenError> {
        match &self.scene {
            Scene::Closed(_) => Ok(Region::Outside),
            Scene::Sphere { coefficients, .. } => coefficients.region(p),
        }
    }

    /// Relative `(ε, μ)` at `p`.
    pub fn medium_at(&self, p: Vec3) -> Result<(Complex64, Complex64), GreenError> {
        let one = Complex64::new(1.0, 0.0);
        Ok(match (&self.geometry, &self.scene) {
            (Geometry::Vacuum, _) => (one, one),
            (Geometry::Homogeneous { material }, _) => {
                let w = Complex64::new(self.omega, 0.0);
                (material.epsilon_at(w), material.mu_at(w))
            }
            (_, Scene::Sphere { eps, mu, coefficients, .. }) => match coefficients.region(p)? {
                Region::Inside => (*eps, *mu),
                Region::Outside => (one, one),
            },
            _ => unreachable!("scene follows geometry"),
        })
    }

    pub fn eval(&self, r: Vec3, rp: Vec3) -> Result<GreenEval, GreenError> {
        self.evaluate(r, rp, true)
    }

    /// Value only; skips the curl series.
    pub fn value(&self, r: Vec3, rp: Vec3) -> Result<Complex3Dyadic, GreenError> {
        Ok(self.evaluate(r, rp, false)?.value)
    }

    fn evaluate(&self, r: Vec3, rp: Vec3, curls: bool) -> Result<GreenEval, GreenError> {
        check_point(r)?;
        check_point(rp)?;
        let sep = sub3(r, rp);
        let scale = norm3(r).max(norm3(rp)).max(self.geometry.radius().unwrap_or(0.0));
        let coincident = norm3(sep) <= 1e-12 * scale || norm3(sep) == 0.0;
        match &self.scene {
            Scene::Closed(cf) => {
                if coincident {
                    return Err(GreenError::Coincidence);
                }
                Ok(cf.eval(sep))
            }
            Scene::Sphere { coefficients, interior, .. } => {
                let (fr, sr) = (coefficients.region(r)?, coefficients.region(rp)?);
                let inner = match interior {
                    None => {
                        if coincident {
                            return Err(GreenError::Coincidence);
                        }
                        return Ok(ClosedForm::vacuum(self.k0).eval(sep));
                    }
                    Some(inner) => inner,
                };
                let direct = match (fr, sr) {
                    (Region::Outside, Region::Outside) => Some(ClosedForm::vacuum(self.k0)),
                    (Region::Inside, Region::Inside) => Some(*inner),
                    _ => None,
                };
                let base = match direct {
                    Some(cf) => {
                        if coincident {
                            return Err(GreenError::Coincidence);
                        }
                        Some(cf.eval(sep))
                    }
                    None => None,
                };
                let floor = base
                    .map(|b| [b.value.max_abs(), b.curl_r.max_abs(), b.curl_rprime.max_abs()])
                    .unwrap_or([0.0; 3]);
                let series = coefficients.pair(fr, sr, r, rp);
                let s = series.sum(coefficients.initial_order(), curls, floor)?;
                let mut out = GreenEval { value: s.value, curl_r: s.curl_r, curl_rprime: s.curl_rprime };
                if let Some(b) = base {
                    out.value += b.value;
                    out.curl_r += b.curl_r;
                    out.curl_rprime += b.curl_rprime;
                }
                Ok(out)
            }
        }
    }

    /// `𝒲(o, r′)`: coefficient of `e^{ikr}/r` in `𝒢(r u_o, r′)`.
    pub fn farfield(&self, o: &SolidAngle, rp: Vec3) -> Result<FarFieldAmplitude, GreenError> {
        check_point(rp)?;
        let u = o.unit_vector();
        let vacuum = || {
            let phase = Complex64::new(0.0, -self.k0 * dot3(u, rp)).exp();
            Complex3Dyadic::transverse_projector(u).scale(phase / (4.0 * PI))
        };
        let w = match &self.scene {
            Scene::Closed(_) if matches!(self.geometry, Geometry::Vacuum) => vacuum(),
            Scene::Closed(_) => return Err(GreenError::NoFarField),
            Scene::Sphere { coefficients, interior, .. } => {
                let source = coefficients.region(rp)?;
                if interior.is_none() {
                    vacuum()
                } else {
                    let direct = if source == Region::Outside { Some(vacuum()) } else { None };
                    let floor = direct.map(|d| d.max_abs()).unwrap_or(0.0);
                    let series = coefficients.farfield_pair(source, u, rp);
                    let s = series.sum(coefficients.initial_order(), false, [floor, 0.0, 0.0])?;
                    let mut w = s.value;
                    if let Some(d) = direct {
                        w += d;
                    }
                    w
                }
            }
        };
        Ok(FarFieldAmplitude { W: w, direction: *o })
    }

    /// `(𝒜_e, 𝒜_m)` with source point `s`; both vanish where the medium is lossless vacuum.
    pub fn aux(&self, r: Vec3, s: Vec3) -> Result<(Complex3Dyadic, Complex3Dyadic), GreenError> {
        let (eps, mu) = self.medium_at(s)?;
        let we = eps.im.max(0.0).sqrt();
        let wm = (-1.0 / mu).im.max(0.0).sqrt();
        if we == 0.0 && wm == 0.0 {
            check_point(r)?;
            return Ok((Complex3Dyadic::zero(), Complex3Dyadic::zero()));
        }
        if wm == 0.0 {
            return Ok((self.value(r, s)?.scale_re(self.k0 * we), Complex3Dyadic::zero()));
        }
        let g = self.eval(r, s)?;
        Ok((g.value.scale_re(self.k0 * we), g.curl_rprime.scale_re(wm)))
    }

    /// `(𝒢_e, 𝒢_m) = (i f 𝒜_e, −i f 𝒜_m)` with `f = √(ħμ₀ω²/π)`.
    pub fn scaled(&self, r: Vec3, s: Vec3) -> Result<(Complex3Dyadic, Complex3Dyadic), GreenError> {
        let (ae, am) = self.aux(r, s)?;
        let f = self.scale_factor();
        Ok((ae.scale(Complex64::new(0.0, f)), am.scale(Complex64::new(0.0, -f))))
    }

    /// `√(ħμ₀ω²/π)`.
    pub fn scale_factor(&self) -> f64 {
        (self.constants.hbar * self.constants.mu0 * self.omega * self.omega / PI).sqrt()
    }
}

fn check_point(p: Vec3) -> Result<(), GreenError> {
    if p.iter().all(|c| c.is_finite()) {
        Ok(())
    } else {
        Err(GreenError::InvalidArgument(format!("non-finite point {p:?}")))
    }
}

pub fn green(geometry: &Geometry, omega: f64, r: Vec3, rprime: Vec3) -> Result<GreenEval, GreenError> {
    GreenFunction::new(geometry, omega)?.eval(r, rprime)
}

pub fn farfield_amplitude(
    geometry: &Geometry,
    omega: f64,
    o: &SolidAngle,
    rprime: Vec3,
) -> Result<FarFieldAmplitude, GreenError> {
    GreenFunction::new(geometry, omega)?.farfield(o, rprime)
}

pub fn aux_dyadics(
    geometry: &Geometry,
    omega: f64,
    r: Vec3,
    s: Vec3,
) -> Result<(Complex3Dyadic, Complex3Dyadic), GreenError> {
    GreenFunction::new(geometry, omega)?.aux(r, s)
}

pub fn scaled_dyadics(
    geometry: &Geometry,
    omega: f64,
    r: Vec3,
    s: Vec3,
    constants: &PhysicalConstants,
) -> Result<(Complex3Dyadic, Complex3Dyadic), GreenError> {
    GreenFunction::with_constants(geometry, omega, *constants)?.scaled(r, s)
}
