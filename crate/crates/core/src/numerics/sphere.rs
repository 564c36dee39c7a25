//! Directions on the unit sphere and product quadrature over solid angle.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::linalg::{norm3, Vec3};
use super::quadrature::gauss_legendre;
use super::NumericsError;

/// A direction `o = (θ, φ)` with `θ ∈ [0, π]` and `φ ∈ [0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolidAngle {
    theta: f64,
    phi: f64,
}

impl SolidAngle {
    /// Builds a direction, wrapping `phi` into `[0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self, NumericsError> {
        if !(0.0..=PI).contains(&theta) || !phi.is_finite() {
            return Err(NumericsError::InvalidArgument(format!(
                "direction angles out of range: theta={theta}, phi={phi}"
            )));
        }
        let mut phi = phi.rem_euclid(2.0 * PI);
        if phi >= 2.0 * PI {
            phi = 0.0;
        }
        Ok(Self { theta, phi })
    }

    /// Direction of a nonzero vector.
    pub fn from_vector(v: Vec3) -> Result<Self, NumericsError> {
        let n = norm3(v);
        if !(n > 0.0) || !n.is_finite() {
            return Err(NumericsError::InvalidArgument("zero direction vector".into()));
        }
        let theta = (v[2] / n).clamp(-1.0, 1.0).acos();
        Self::new(theta, v[1].atan2(v[0]))
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn unit_vector(&self) -> Vec3 {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// The antipodal direction.
    pub fn opposite(&self) -> Self {
        let phi = (self.phi + PI).rem_euclid(2.0 * PI);
        Self { theta: PI - self.theta, phi }
    }
}

/// Quadrature nodes and weights over the full solid angle.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereRule {
    pub degree: usize,
    pub nodes: Vec<SolidAngle>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Iterates `(unit vector, weight)` pairs.
    pub fn points(&self) -> impl Iterator<Item = (Vec3, f64)> + '_ {
        self.nodes.iter().zip(&self.weights).map(|(o, &w)| (o.unit_vector(), w))
    }

    pub fn integrate<T, F>(&self, mut f: F) -> T
    where
        T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
        F: FnMut(Vec3) -> T,
    {
        self.points().fold(T::default(), |acc, (u, w)| acc + f(u) * w)
    }
}

/// Gauss–Legendre in `cos θ` with `degree + 1` nodes times a `2·degree + 2`
/// point trapezoid rule in `φ`.
///
/// Products of two spherical harmonics of degree `≤ degree` are integrated
/// exactly.
pub fn sphere_quadrature(degree: usize) -> Result<SphereRule, NumericsError> {
    if degree == 0 {
        return Err(NumericsError::InvalidArgument("sphere rule degree must be ≥ 1".into()));
    }
    let (t, wt) = gauss_legendre(degree + 1)?;
    let nphi = 2 * degree + 2;
    let dphi = 2.0 * PI / nphi as f64;
    let mut nodes = Vec::with_capacity(t.len() * nphi);
    let mut weights = Vec::with_capacity(t.len() * nphi);
    for (&ti, &wi) in t.iter().zip(&wt) {
        let theta = ti.clamp(-1.0, 1.0).acos();
        for j in 0..nphi {
            nodes.push(SolidAngle { theta, phi: j as f64 * dphi });
            weights.push(wi * dphi);
        }
    }
    Ok(SphereRule { degree, nodes, weights })
}
