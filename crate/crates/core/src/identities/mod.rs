//! Identity checks: each assembles both sides of a field identity numerically,
//! refines the quadrature, and returns an [`IdentityReport`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dispersion::{verify_coupling_identity, verify_kramers_kronig, Material, ResponseKind};
use crate::green::Geometry;
use crate::numerics::linalg::{norm3, scale3, Vec3};
use crate::numerics::PhysicalConstants;
use crate::report::IdentityReport;

mod asymptotic;
mod integral;
mod pointwise;

pub use asymptotic::{jones_remainder, verify_frequency_integrals, verify_jones_lemma};
pub use integral::{
    verify_commutator_kernel, verify_fundamental_relation, verify_fundamental_relation_without_volume,
    verify_mode_completeness, verify_vacuum_closed_form,
};
pub use pointwise::{verify_mode_farfield_link, verify_reciprocity, verify_transversality};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("invalid config field `{field}`: {message}")]
    Invalid { field: String, message: String },
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field: field.into(), message: message.into() }
}

/// One refinement level of the volume and surface quadratures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureLevel {
    /// Gauss–Legendre nodes along the radius.
    pub radial: usize,
    /// Sphere-rule degree for the angular directions.
    pub angular: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencySettings {
    /// `Ω|r − r′|/c`.
    pub separation_kr: f64,
    /// `Ω′/Ω`.
    pub omega_ratio: f64,
    /// Regulators in units of `1/Ω`; the pole offset is tied as `η = δΩ²`.
    pub regulators: Vec<f64>,
    /// Integration cutoff in units of `1/δ_min`.
    pub cutoff_factor: f64,
}

impl Default for FrequencySettings {
    fn default() -> Self {
        Self { separation_kr: 3.0, omega_ratio: 2.0, regulators: vec![0.2, 0.1, 0.05, 0.025], cutoff_factor: 40.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JonesSettings {
    pub xi: f64,
    /// Stationary direction `n`; normalized on use.
    pub direction: Vec3,
}

impl Default for JonesSettings {
    fn default() -> Self {
        Self { xi: 50.0, direction: [1.0, 2.0, 2.0] }
    }
}

/// Everything a check needs besides its name.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckConfig {
    pub geometry: Geometry,
    pub omegas: Vec<f64>,
    /// Field-point pairs in the vacuum exterior.
    pub pairs: Vec<(Vec3, Vec3)>,
    /// Points inside the sample, used by checks that probe every region.
    pub interior_points: Vec<Vec3>,
    pub levels: Vec<QuadratureLevel>,
    /// Incidence-direction degrees as multiples of the truncation order `L`.
    pub mode_degree_factors: Vec<f64>,
    pub frequency: FrequencySettings,
    pub jones: JonesSettings,
    pub tolerances: BTreeMap<String, f64>,
    pub constants: PhysicalConstants,
}

const EXTERIOR: [[f64; 3]; 4] = [[1.2, 0.5, 0.9], [-0.8, 1.3, -0.6], [0.3, -1.4, 0.8], [1.1, 0.9, -0.7]];
const INTERIOR: [[f64; 3]; 3] = [[0.3, -0.2, 0.25], [-0.35, 0.1, -0.2], [0.1, 0.45, 0.3]];

impl CheckConfig {
    /// Defaults scaled to the sphere radius, or to `1/k0` without a sphere.
    pub fn new(geometry: Geometry, omegas: Vec<f64>) -> Self {
        let constants = PhysicalConstants::si();
        let length = geometry
            .radius()
            .unwrap_or_else(|| omegas.first().map(|&w| 1.0 / constants.wavenumber(w)).unwrap_or(1.0));
        let at = |p: [f64; 3]| scale3(length, p);
        let pairs = EXTERIOR.chunks(2).map(|p| (at(p[0]), at(p[1]))).collect();
        let interior_points =
            if geometry.radius().is_some() { INTERIOR.iter().map(|&p| at(p)).collect() } else { Vec::new() };
        Self {
            geometry,
            omegas,
            pairs,
            interior_points,
            levels: vec![
                QuadratureLevel { radial: 6, angular: 8 },
                QuadratureLevel { radial: 10, angular: 16 },
                QuadratureLevel { radial: 14, angular: 24 },
                QuadratureLevel { radial: 18, angular: 32 },
            ],
            mode_degree_factors: vec![1.0, 1.5, 2.0],
            frequency: FrequencySettings::default(),
            jones: JonesSettings::default(),
            tolerances: BTreeMap::new(),
            constants,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.geometry.validate().map_err(|e| invalid("geometry", e.to_string()))?;
        if self.omegas.is_empty() || self.omegas.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(invalid("omegas", "need at least one positive frequency"));
        }
        if self.pairs.is_empty() {
            return Err(invalid("pairs", "need at least one point pair"));
        }
        let finite = |p: &Vec3| p.iter().all(|c| c.is_finite());
        if let Some(a) = self.geometry.radius() {
            for (i, (r, rp)) in self.pairs.iter().enumerate() {
                for p in [r, rp] {
                    if !finite(p) || norm3(*p) < 1.05 * a {
                        return Err(invalid(
                            "pairs",
                            format!("pair {i}: point {p:?} is not outside the sphere by 0.05 radius"),
                        ));
                    }
                }
            }
            for p in &self.interior_points {
                if !finite(p) || norm3(*p) > 0.95 * a {
                    return Err(invalid("interior_points", format!("{p:?} is not inside the sphere by 0.05 radius")));
                }
            }
        } else if !self.interior_points.is_empty() {
            return Err(invalid("interior_points", "the geometry has no interior"));
        }
        for (i, (r, rp)) in self.pairs.iter().enumerate() {
            if !finite(r) || !finite(rp) || norm3(crate::numerics::linalg::sub3(*r, *rp)) == 0.0 {
                return Err(invalid("pairs", format!("pair {i} must hold two distinct finite points")));
            }
        }
        if self.levels.is_empty() || self.levels.iter().any(|l| l.radial == 0 || l.angular == 0) {
            return Err(invalid("levels", "need at least one level with positive node counts"));
        }
        if self.mode_degree_factors.is_empty() || self.mode_degree_factors.iter().any(|f| !(*f > 0.0)) {
            return Err(invalid("mode_degree_factors", "need positive factors"));
        }
        let f = &self.frequency;
        if !(f.separation_kr > 0.0) || !(f.omega_ratio > 0.0) || f.omega_ratio == 1.0 {
            return Err(invalid("frequency", "separation must be positive and the frequency ratio differ from 1"));
        }
        if f.regulators.len() < 3
            || f.regulators.iter().any(|d| !(*d > 0.0))
            || f.regulators.windows(2).any(|w| !(w[1] < w[0]))
        {
            return Err(invalid("frequency.regulators", "need three or more positive, decreasing values"));
        }
        if !(f.cutoff_factor > 0.0) {
            return Err(invalid("frequency.cutoff_factor", "must be positive"));
        }
        if !(self.jones.xi > 0.0) || norm3(self.jones.direction) == 0.0 {
            return Err(invalid("jones", "need positive xi and a nonzero direction"));
        }
        for (name, tol) in &self.tolerances {
            Check::from_str(name)?;
            if !(*tol > 0.0) {
                return Err(invalid("tolerances", format!("{name}: tolerance must be positive")));
            }
        }
        Ok(())
    }

    /// Sample material, or vacuum when the scene has none.
    pub fn material(&self) -> Material {
        self.geometry.material().cloned().unwrap_or(Material::Vacuum)
    }

    pub fn tolerance(&self, check: Check) -> f64 {
        self.tolerances.get(check.name()).copied().unwrap_or_else(|| check.default_tolerance(&self.geometry))
    }

    /// Every field point used by pointwise checks, exterior first.
    pub(crate) fn all_points(&self) -> Vec<Vec3> {
        let mut pts: Vec<Vec3> = self.pairs.iter().flat_map(|&(r, rp)| [r, rp]).collect();
        pts.extend(&self.interior_points);
        pts
    }
}

/// Registered identity checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    CommutatorKernel,
    CouplingIdentity,
    FrequencyIntegrals,
    FundamentalRelation,
    JonesLemma,
    KramersKronig,
    ModeCompleteness,
    ModeFarfieldLink,
    Reciprocity,
    Transversality,
    VacuumClosedForm,
}

impl Check {
    /// Alphabetical by name.
    pub const ALL: [Check; 11] = [
        Check::CommutatorKernel,
        Check::CouplingIdentity,
        Check::FrequencyIntegrals,
        Check::FundamentalRelation,
        Check::JonesLemma,
        Check::KramersKronig,
        Check::ModeCompleteness,
        Check::ModeFarfieldLink,
        Check::Reciprocity,
        Check::Transversality,
        Check::VacuumClosedForm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::CommutatorKernel => "commutator_kernel",
            Check::CouplingIdentity => "coupling_identity",
            Check::FrequencyIntegrals => "frequency_integrals",
            Check::FundamentalRelation => "fundamental_relation",
            Check::JonesLemma => "jones_lemma",
            Check::KramersKronig => "kramers_kronig",
            Check::ModeCompleteness => "mode_completeness",
            Check::ModeFarfieldLink => "mode_farfield_link",
            Check::Reciprocity => "reciprocity",
            Check::Transversality => "transversality",
            Check::VacuumClosedForm => "vacuum_closed_form",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Check::CommutatorKernel => "field commutator kernel: volume plus mode terms equal (ħμ0ω²/π) Im G",
            Check::CouplingIdentity => "reservoir couplings integrate to the time-domain response derivative",
            Check::FrequencyIntegrals => "regularized frequency integrals of Im G against their contour results",
            Check::FundamentalRelation => "lossy-volume integral plus far-field surface term equals Im G",
            Check::JonesLemma => "stationary-phase limit of oscillatory direction integrals",
            Check::KramersKronig => "causal response: Re chi from a principal-value integral of Im chi",
            Check::ModeCompleteness => "scattering modes summed over incidence equal 16π² ∫ Wᵀ W*",
            Check::ModeFarfieldLink => "scattering mode equals 4π e·W of a dipole at infinity",
            Check::Reciprocity => "G(r, r') equals the transpose of G(r', r)",
            Check::Transversality => "far-field amplitudes are orthogonal to the observation direction",
            Check::VacuumClosedForm => "vacuum surface integral versus Im G and its sin/cos closed form",
        }
    }

    pub fn default_tolerance(self, geometry: &Geometry) -> f64 {
        let magnetic = geometry.material().is_some_and(|m| !m.poles(ResponseKind::Mu).is_empty());
        let closed = !matches!(geometry, Geometry::SphereInVacuum { .. });
        match self {
            Check::CommutatorKernel => 1e-6,
            Check::CouplingIdentity => 1e-4,
            Check::FrequencyIntegrals => 1e-3,
            Check::FundamentalRelation if closed => 1e-10,
            Check::FundamentalRelation if magnetic => 1e-5,
            Check::FundamentalRelation => 1e-6,
            // Relative deviation of the remainder ratio from 4.
            Check::JonesLemma => 0.2,
            Check::KramersKronig => 1e-5,
            Check::ModeCompleteness if closed || geometry.material().is_some_and(Material::is_vacuum) => 1e-10,
            Check::ModeCompleteness => 1e-7,
            Check::ModeFarfieldLink => 1e-8,
            Check::Reciprocity if closed => 1e-13,
            Check::Reciprocity => 1e-10,
            Check::Transversality => 1e-12,
            Check::VacuumClosedForm => 1e-10,
        }
    }

    pub fn run(self, config: &CheckConfig) -> IdentityReport {
        if let Err(e) = config.validate() {
            let mut r = IdentityReport::new(self.name(), config.tolerance(self));
            r.fail(e);
            return r.finish();
        }
        match self {
            Check::CommutatorKernel => verify_commutator_kernel(config),
            Check::CouplingIdentity => coupling_identity(config),
            Check::FrequencyIntegrals => verify_frequency_integrals(config),
            Check::FundamentalRelation => verify_fundamental_relation(config),
            Check::JonesLemma => verify_jones_lemma(config),
            Check::KramersKronig => kramers_kronig(config),
            Check::ModeCompleteness => verify_mode_completeness(config),
            Check::ModeFarfieldLink => verify_mode_farfield_link(config),
            Check::Reciprocity => verify_reciprocity(config),
            Check::Transversality => verify_transversality(config),
            Check::VacuumClosedForm => vacuum_closed_form(config),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Check::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| ConfigError::UnknownCheck(s.to_owned()))
    }
}

/// Per-level worst residual, accumulated over frequencies, pairs and sub-checks.
#[derive(Debug, Default)]
pub(crate) struct SweepMax(Vec<f64>);

impl SweepMax {
    pub fn record(&mut self, level: usize, residual: f64) {
        if self.0.len() <= level {
            self.0.resize(level + 1, 0.0);
        }
        // NaN must win so a broken level is never hidden.
        if residual.is_nan() || residual > self.0[level] {
            self.0[level] = residual;
        }
    }

    pub fn into_report(self, report: &mut IdentityReport) {
        for (level, r) in self.0.into_iter().enumerate() {
            report.push_sweep(level as u32, r);
        }
    }
}

/// Characteristic pole frequency of the material, or `None` without poles.
fn pole_scale(material: &Material) -> Option<f64> {
    [ResponseKind::Epsilon, ResponseKind::Mu]
        .iter()
        .flat_map(|&k| material.poles(k))
        .map(|p| p.omega0.max(p.gamma))
        .reduce(f64::max)
}

fn kramers_kronig(config: &CheckConfig) -> IdentityReport {
    let tol = config.tolerance(Check::KramersKronig);
    let material = config.material();
    let scale = pole_scale(&material).unwrap_or(config.omegas[0]);
    let mut grid: Vec<f64> = (1..=80).map(|i| 0.05 * i as f64 * scale).collect();
    for kind in [ResponseKind::Epsilon, ResponseKind::Mu] {
        for p in material.poles(kind) {
            grid.extend([p.omega0 - p.gamma, p.omega0 + p.gamma].into_iter().filter(|w| *w > 0.0));
        }
    }
    grid.extend(&config.omegas);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    match verify_kramers_kronig(&material, &grid, 1e-3 * scale, tol) {
        Ok(r) => r,
        Err(e) => {
            let mut r = IdentityReport::new(Check::KramersKronig.name(), tol);
            r.fail(e);
            r.finish()
        }
    }
}

fn coupling_identity(config: &CheckConfig) -> IdentityReport {
    let tol = config.tolerance(Check::CouplingIdentity);
    let material = config.material();
    let scale = pole_scale(&material).unwrap_or(config.omegas[0]);
    let taus = [1.0 / scale, 2.5 / scale, -0.7 / scale];
    match verify_coupling_identity(&material, &taus, &config.constants, tol) {
        Ok(r) => r,
        Err(e) => {
            let mut r = IdentityReport::new(Check::CouplingIdentity.name(), tol);
            r.fail(e);
            r.finish()
        }
    }
}

fn vacuum_closed_form(config: &CheckConfig) -> IdentityReport {
    let tol = config.tolerance(Check::VacuumClosedForm);
    let mut out = IdentityReport::new(Check::VacuumClosedForm.name(), tol);
    let mut sweep = SweepMax::default();
    let mut worst: f64 = 0.0;
    for &omega in &config.omegas {
        for &(r, rp) in &config.pairs {
            let rep = verify_vacuum_closed_form(omega, r, rp, &config.constants, tol);
            worst = worst.max(rep.residual);
            for p in &rep.sweep {
                sweep.record(p.level as usize, p.residual);
            }
            out.errors.extend(rep.errors);
        }
    }
    out.param("pairs", config.pairs.len()).param("frequencies", config.omegas.len());
    sweep.into_report(&mut out);
    out.residual = worst;
    out.finish()
}

#[cfg(test)]
mod tests;
