//! Run configuration: JSON in dimensionless groups plus one reference length.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use mlnf_core::dispersion::{DispersionModel, LorentzPole, Material};
use mlnf_core::green::Geometry;
use mlnf_core::identities::{Check, CheckConfig, ConfigError as CheckConfigError};
use mlnf_core::numerics::linalg::{scale3, Vec3};
use mlnf_core::numerics::PhysicalConstants;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parse error at `{field}`: {message}")]
    Parse { field: String, message: String },
    #[error("invalid `{field}`: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field: field.into(), message: message.into() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeometrySpec {
    Vacuum,
    Homogeneous,
    /// Sphere of radius `reference_length`.
    Sphere,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MaterialSpec {
    /// Relative `ε`, `μ` (as `[re, im]`) reproduced by one Lorentz pole each at the
    /// first configured frequency.
    Matched { eps: Complex64, mu: Complex64 },
    /// Explicit Lorentz poles, frequencies in rad/s.
    Poles {
        #[serde(default)]
        eps_poles: Vec<LorentzPole>,
        #[serde(default)]
        mu_poles: Vec<LorentzPole>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    /// Length unit in metres; the sphere radius when there is one.
    pub reference_length: f64,
    pub geometry: GeometrySpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub material: Option<MaterialSpec>,
    /// Frequencies as `k0 · reference_length`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ka: Vec<f64>,
    /// Additional frequencies in rad/s.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub omegas: Vec<f64>,
    /// Exterior point pairs in units of `reference_length`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<[Vec3; 2]>>,
    /// Interior points in units of `reference_length`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interior_points: Option<Vec<Vec3>>,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<Check, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
}

/// Reads, parses and validates a config file.
pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_owned(), source })?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<RunConfig, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let config: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        ConfigError::Parse { field, message: e.into_inner().to_string() }
    })?;
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(invalid(
                "schema_version",
                format!("expected {SCHEMA_VERSION}, got {}", self.schema_version),
            ));
        }
        if !(self.reference_length > 0.0) || !self.reference_length.is_finite() {
            return Err(invalid("reference_length", "must be a positive length"));
        }
        if self.ka.is_empty() && self.omegas.is_empty() {
            return Err(invalid("ka", "give at least one frequency via `ka` or `omegas`"));
        }
        if self.ka.iter().chain(&self.omegas).any(|x| !(*x > 0.0) || !x.is_finite()) {
            return Err(invalid("ka", "frequencies must be positive"));
        }
        match (&self.geometry, &self.material) {
            (GeometrySpec::Vacuum, Some(_)) => return Err(invalid("material", "vacuum takes no material")),
            (GeometrySpec::Homogeneous | GeometrySpec::Sphere, None) => {
                return Err(invalid("material", "required for this geometry"))
            }
            _ => {}
        }
        if self.checks.is_empty() {
            return Err(invalid("checks", "list at least one check"));
        }
        let mut seen = BTreeSet::new();
        for c in &self.checks {
            if !seen.insert(*c) {
                return Err(invalid("checks", format!("`{c}` listed twice")));
            }
        }
        if self.jobs == Some(0) {
            return Err(invalid("jobs", "must be at least 1"));
        }
        if let Some(pairs) = &self.pairs {
            if pairs.is_empty() {
                return Err(invalid("pairs", "must not be empty when given"));
            }
        }
        self.check_config()?.validate().map_err(|e| match e {
            CheckConfigError::Invalid { field, message } => invalid(&field, message),
            CheckConfigError::UnknownCheck(name) => invalid("tolerances", format!("unknown check `{name}`")),
        })
    }

    pub fn constants(&self) -> PhysicalConstants {
        PhysicalConstants::si()
    }

    /// Frequencies in rad/s: `ka` entries first, then `omegas`.
    pub fn frequencies(&self) -> Vec<f64> {
        let c = self.constants().c;
        self.ka.iter().map(|x| x * c / self.reference_length).chain(self.omegas.iter().copied()).collect()
    }

    fn material(&self, omega: f64) -> Result<Material, ConfigError> {
        let model = match &self.material {
            None => return Ok(Material::Vacuum),
            Some(MaterialSpec::Matched { eps, mu }) => {
                DispersionModel::matched(omega, *eps, *mu).map_err(|e| invalid("material", e.to_string()))?
            }
            Some(MaterialSpec::Poles { eps_poles, mu_poles }) => {
                DispersionModel { eps_poles: eps_poles.clone(), mu_poles: mu_poles.clone() }
            }
        };
        let m = Material::Lorentz(model);
        m.validate().map_err(|e| invalid("material", e.to_string()))?;
        Ok(m)
    }

    /// The SI-valued configuration the identity checks consume.
    pub fn check_config(&self) -> Result<CheckConfig, ConfigError> {
        let omegas = self.frequencies();
        let first = *omegas.first().ok_or_else(|| invalid("ka", "no frequency"))?;
        let l = self.reference_length;
        let geometry = match self.geometry {
            GeometrySpec::Vacuum => Geometry::Vacuum,
            GeometrySpec::Homogeneous => Geometry::Homogeneous { material: self.material(first)? },
            GeometrySpec::Sphere => Geometry::SphereInVacuum { radius: l, material: self.material(first)? },
        };
        let mut config = CheckConfig::new(geometry, omegas);
        config.constants = self.constants();
        if let Some(pairs) = &self.pairs {
            config.pairs = pairs.iter().map(|[r, rp]| (scale3(l, *r), scale3(l, *rp))).collect();
        }
        if let Some(points) = &self.interior_points {
            config.interior_points = points.iter().map(|p| scale3(l, *p)).collect();
        }
        config.tolerances = self.tolerances.iter().map(|(c, t)| (c.name().to_owned(), *t)).collect();
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "schema_version": 1,
        "reference_length": 1e-6,
        "geometry": {"kind": "vacuum"},
        "ka": [1.0],
        "checks": ["reciprocity"]
    }"#;

    #[test]
    fn minimal_vacuum_config() {
        let c = parse_config_str(MINIMAL).unwrap();
        assert_eq!(c.checks, vec![Check::Reciprocity]);
        assert!((c.frequencies()[0] - 299_792_458.0e6).abs() < 1e-3);
    }

    #[test]
    fn unknown_check_is_named() {
        let text = MINIMAL.replace("\"reciprocity\"", "\"foo\"");
        let err = parse_config_str(&text).unwrap_err().to_string();
        assert!(err.contains("foo") && err.contains("checks"), "{err}");
        let text = MINIMAL.replace("\"checks\"", "\"tolerances\": {\"foo\": 1e-3}, \"checks\"");
        let err = parse_config_str(&text).unwrap_err().to_string();
        assert!(err.contains("foo"), "{err}");
    }

    #[test]
    fn schema_violations_name_the_field() {
        let err = parse_config_str(&MINIMAL.replace("\"schema_version\": 1", "\"schema_version\": 2")).unwrap_err();
        assert!(err.to_string().contains("schema_version"), "{err}");
        let err = parse_config_str(&MINIMAL.replace("1e-6", "-1.0")).unwrap_err();
        assert!(err.to_string().contains("reference_length"), "{err}");
        let err = parse_config_str(&MINIMAL.replace("\"ka\"", "\"kaa\"")).unwrap_err();
        assert!(err.to_string().contains("kaa"), "{err}");
        let err = parse_config_str(&MINIMAL.replace("[1.0]", "\"one\"")).unwrap_err();
        assert!(err.to_string().contains("ka"), "{err}");
    }

    #[test]
    fn full_sphere_config_round_trips() {
        let text = r#"{
            "schema_version": 1,
            "reference_length": 5e-8,
            "geometry": {"kind": "sphere"},
            "material": {"kind": "matched", "eps": [2.0, 1.0], "mu": [1.5, 0.3]},
            "ka": [1.0, 0.5],
            "omegas": [3e15],
            "pairs": [[[1.2, 0.5, 0.9], [-0.8, 1.3, -0.6]]],
            "interior_points": [[0.3, -0.2, 0.25]],
            "checks": ["reciprocity", "fundamental_relation", "jones_lemma"],
            "tolerances": {"reciprocity": 1e-11},
            "output_dir": "out",
            "jobs": 2
        }"#;
        let c = parse_config_str(text).unwrap();
        let again = parse_config_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(c, again);
        let cc = c.check_config().unwrap();
        assert_eq!(cc.omegas.len(), 3);
        assert_eq!(cc.pairs.len(), 1);
        assert_eq!(cc.tolerance(Check::Reciprocity), 1e-11);
        assert_eq!(cc.geometry.radius(), Some(5e-8));
    }

    #[test]
    fn points_must_clear_the_sphere() {
        let text = r#"{
            "schema_version": 1, "reference_length": 1.0,
            "geometry": {"kind": "sphere"},
            "material": {"kind": "poles", "eps_poles": [{"omega0": 4e8, "omegap": 3e8, "gamma": 1e8}]},
            "omegas": [3e8],
            "pairs": [[[1.01, 0.0, 0.0], [0.0, 2.0, 0.0]]],
            "checks": ["reciprocity"]
        }"#;
        let err = parse_config_str(text).unwrap_err().to_string();
        assert!(err.contains("pairs"), "{err}");
    }

    #[test]
    fn sphere_needs_material() {
        let text = MINIMAL.replace("\"vacuum\"", "\"sphere\"");
        assert!(parse_config_str(&text).unwrap_err().to_string().contains("material"));
    }
}
