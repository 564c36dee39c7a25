//! Outcome of one identity check.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Number(f64),
    Text(String),
}

impl From<f64> for ParamValue {
    fn from(x: f64) -> Self {
        ParamValue::Number(x)
    }
}

impl From<usize> for ParamValue {
    fn from(x: usize) -> Self {
        ParamValue::Number(x as f64)
    }
}

impl From<&str> for ParamValue {
    fn from(s: &str) -> Self {
        ParamValue::Text(s.to_owned())
    }
}

impl From<String> for ParamValue {
    fn from(s: String) -> Self {
        ParamValue::Text(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub level: u32,
    #[serde(with = "finite_or_null")]
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub name: String,
    pub parameters: BTreeMap<String, ParamValue>,
    /// Relative residual of the finest refinement; infinite when evaluation failed.
    #[serde(with = "finite_or_null")]
    pub residual: f64,
    pub tolerance: f64,
    pub converged: bool,
    pub sweep: Vec<SweepPoint>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
}

impl IdentityReport {
    pub fn new(name: impl Into<String>, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            parameters: BTreeMap::new(),
            residual: 0.0,
            tolerance,
            converged: false,
            sweep: Vec::new(),
            errors: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<ParamValue>) -> &mut Self {
        self.parameters.insert(key.to_owned(), value.into());
        self
    }

    pub fn number(&self, key: &str) -> Option<f64> {
        match self.parameters.get(key) {
            Some(ParamValue::Number(x)) => Some(*x),
            _ => None,
        }
    }

    pub fn push_sweep(&mut self, level: u32, residual: f64) {
        self.sweep.push(SweepPoint { level, residual });
    }

    pub fn fail(&mut self, message: impl fmt::Display) {
        self.errors.push(message.to_string());
    }

    /// Sets `residual` to the last sweep entry (when no explicit residual is
    /// wanted) and decides `converged`.
    pub fn finish_from_sweep(mut self) -> Self {
        if let Some(last) = self.sweep.last() {
            self.residual = last.residual;
        }
        self.finish()
    }

    /// Decides `converged`: no evaluation errors, residual within tolerance, and
    /// no refinement step that multiplies an above-tolerance residual by more than 10.
    pub fn finish(mut self) -> Self {
        if !self.errors.is_empty() {
            self.residual = f64::INFINITY;
        }
        let regressed = self
            .sweep
            .windows(2)
            .any(|w| w[1].residual > 10.0 * w[0].residual && w[1].residual > self.tolerance);
        if regressed {
            self.errors.push("residual grew by more than 10x under refinement".into());
        }
        self.converged = self.errors.is_empty()
            && self.residual.is_finite()
            && self.residual <= self.tolerance
            && !regressed;
        self
    }
}

impl IdentityReport {
    /// Marks a finished report failed for a reason other than its main residual,
    /// keeping that residual as measured.
    pub fn reject(mut self, reason: impl fmt::Display) -> Self {
        self.converged = false;
        self.errors.push(reason.to_string());
        self
    }
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<28} {} residual={:.3e} tol={:.1e}",
            self.name,
            if self.converged { "PASS" } else { "FAIL" },
            self.residual,
            self.tolerance
        )
    }
}

mod finite_or_null {
    use super::*;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn converged_requires_tolerance() {
        let mut r = IdentityReport::new("x", 1e-6);
        r.push_sweep(0, 1e-3);
        r.push_sweep(1, 1e-7);
        let r = r.finish_from_sweep();
        assert!(r.converged && r.residual == 1e-7);

        let mut r = IdentityReport::new("x", 1e-9);
        r.push_sweep(0, 1e-7);
        assert!(!r.finish_from_sweep().converged);
    }

    #[test]
    fn regression_fails_the_report() {
        let mut r = IdentityReport::new("x", 1e-2);
        r.push_sweep(0, 1e-4);
        r.push_sweep(1, 5e-2);
        r.push_sweep(2, 1e-3);
        let r = r.finish_from_sweep();
        assert!(!r.converged);
    }

    #[test]
    fn floor_noise_is_not_a_regression() {
        let mut r = IdentityReport::new("x", 1e-10);
        r.push_sweep(0, 1e-16);
        r.push_sweep(1, 3e-15);
        assert!(r.finish_from_sweep().converged);
    }

    #[test]
    fn errors_fail_the_report() {
        let mut r = IdentityReport::new("x", 1.0);
        r.fail("boom");
        let r = r.finish();
        assert!(!r.converged && r.residual.is_infinite());
    }
}
