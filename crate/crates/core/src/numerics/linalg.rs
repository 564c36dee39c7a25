//! Complex 3-vectors and 3x3 dyadics.
//!
//! Products are bilinear (no implicit conjugation); use [`Complex3Vector::hdot`]
//! or [`Complex3Dyadic::conj`] where a Hermitian form is wanted.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type Vec3 = [f64; 3];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn dot3(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross3(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm3(a: Vec3) -> f64 {
    dot3(a, a).sqrt()
}

pub fn sub3(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn add3(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn scale3(s: f64, a: Vec3) -> Vec3 {
    [s * a[0], s * a[1], s * a[2]]
}

/// Returns `a / |a|`, or `None` for the zero vector.
pub fn normalize3(a: Vec3) -> Option<Vec3> {
    let n = norm3(a);
    (n > 0.0 && n.is_finite()).then(|| scale3(1.0 / n, a))
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Complex3Vector(pub [Complex64; 3]);

impl Complex3Vector {
    pub const fn new(x: Complex64, y: Complex64, z: Complex64) -> Self {
        Self([x, y, z])
    }

    pub fn zero() -> Self {
        Self([ZERO; 3])
    }

    pub fn from_real(v: Vec3) -> Self {
        Self(v.map(|x| Complex64::new(x, 0.0)))
    }

    /// Bilinear product `a · b`.
    pub fn dot(&self, other: &Self) -> Complex64 {
        (0..3).map(|i| self.0[i] * other.0[i]).sum()
    }

    /// Hermitian product `conj(a) · b`.
    pub fn hdot(&self, other: &Self) -> Complex64 {
        (0..3).map(|i| self.0[i].conj() * other.0[i]).sum()
    }

    pub fn dot_real(&self, v: Vec3) -> Complex64 {
        (0..3).map(|i| self.0[i] * v[i]).sum()
    }

    pub fn cross(&self, other: &Self) -> Self {
        let (a, b) = (&self.0, &other.0);
        Self([
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ])
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(self.0.map(|x| x * s))
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|x| x.conj()))
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    /// Outer product `a ⊗ b` without conjugation.
    pub fn outer(&self, other: &Self) -> Complex3Dyadic {
        let mut d = Complex3Dyadic::zero();
        for i in 0..3 {
            for j in 0..3 {
                d.0[i][j] = self.0[i] * other.0[j];
            }
        }
        d
    }
}

impl Index<usize> for Complex3Vector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl Add for Complex3Vector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for Complex3Vector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl AddAssign for Complex3Vector {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Mul<Complex64> for Complex3Vector {
    type Output = Self;
    fn mul(self, s: Complex64) -> Self {
        self.scale(s)
    }
}

impl Neg for Complex3Vector {
    type Output = Self;
    fn neg(self) -> Self {
        Self(self.0.map(|x| -x))
    }
}

/// A 3x3 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Complex3Dyadic(pub [[Complex64; 3]; 3]);

impl Complex3Dyadic {
    pub fn zero() -> Self {
        Self([[ZERO; 3]; 3])
    }

    pub fn identity() -> Self {
        let mut d = Self::zero();
        for i in 0..3 {
            d.0[i][i] = ONE;
        }
        d
    }

    pub fn from_real(m: [[f64; 3]; 3]) -> Self {
        Self(m.map(|row| row.map(|x| Complex64::new(x, 0.0))))
    }

    /// Real outer product `a ⊗ b`.
    pub fn outer_real(a: Vec3, b: Vec3) -> Self {
        let mut d = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                d.0[i][j] = Complex64::new(a[i] * b[j], 0.0);
            }
        }
        d
    }

    /// The matrix of `v ↦ a × v`.
    pub fn cross_matrix(a: Vec3) -> Self {
        Self::from_real([[0.0, -a[2], a[1]], [a[2], 0.0, -a[0]], [-a[1], a[0], 0.0]])
    }

    /// `I − u u` for a unit vector `u`.
    pub fn transverse_projector(u: Vec3) -> Self {
        Self::identity() - Self::outer_real(u, u)
    }

    pub fn transpose(&self) -> Self {
        let mut d = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                d.0[i][j] = self.0[j][i];
            }
        }
        d
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|row| row.map(|x| x.conj())))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    /// Entrywise real part, as a dyadic with zero imaginary parts.
    pub fn re(&self) -> Self {
        Self(self.0.map(|row| row.map(|x| Complex64::new(x.re, 0.0))))
    }

    /// Entrywise imaginary part, as a dyadic with zero imaginary parts.
    pub fn im(&self) -> Self {
        Self(self.0.map(|row| row.map(|x| Complex64::new(x.im, 0.0))))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(self.0.map(|row| row.map(|x| x * s)))
    }

    pub fn scale_re(&self, s: f64) -> Self {
        Self(self.0.map(|row| row.map(|x| x * s)))
    }

    /// Matrix product `self · other`.
    pub fn dot(&self, other: &Self) -> Self {
        let mut d = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                d.0[i][j] = (0..3).map(|k| self.0[i][k] * other.0[k][j]).sum();
            }
        }
        d
    }

    /// `D · v`.
    pub fn apply(&self, v: &Complex3Vector) -> Complex3Vector {
        let mut out = [ZERO; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..3).map(|k| self.0[i][k] * v.0[k]).sum();
        }
        Complex3Vector(out)
    }

    /// `v · D`.
    pub fn left_apply(&self, v: &Complex3Vector) -> Complex3Vector {
        let mut out = [ZERO; 3];
        for (j, o) in out.iter_mut().enumerate() {
            *o = (0..3).map(|k| v.0[k] * self.0[k][j]).sum();
        }
        Complex3Vector(out)
    }

    pub fn left_apply_real(&self, v: Vec3) -> Complex3Vector {
        self.left_apply(&Complex3Vector::from_real(v))
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |m, x| m.max(x.norm()))
    }

    pub fn frobenius(&self) -> f64 {
        self.0.iter().flatten().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_finite())
    }

    pub fn row(&self, i: usize) -> Complex3Vector {
        Complex3Vector(self.0[i])
    }
}

impl Index<(usize, usize)> for Complex3Dyadic {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Complex3Dyadic {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.0[i][j]
    }
}

impl Add for Complex3Dyadic {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        self += o;
        self
    }
}

impl Sub for Complex3Dyadic {
    type Output = Self;
    fn sub(mut self, o: Self) -> Self {
        self -= o;
        self
    }
}

impl AddAssign for Complex3Dyadic {
    fn add_assign(&mut self, o: Self) {
        for i in 0..3 {
            for j in 0..3 {
                self.0[i][j] += o.0[i][j];
            }
        }
    }
}

impl SubAssign for Complex3Dyadic {
    fn sub_assign(&mut self, o: Self) {
        for i in 0..3 {
            for j in 0..3 {
                self.0[i][j] -= o.0[i][j];
            }
        }
    }
}

impl Mul<Complex64> for Complex3Dyadic {
    type Output = Self;
    fn mul(self, s: Complex64) -> Self {
        self.scale(s)
    }
}

impl Mul<f64> for Complex3Dyadic {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.scale_re(s)
    }
}

impl Neg for Complex3Dyadic {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale_re(-1.0)
    }
}

/// Entrywise max `|a − b|` over `max(|a|, |b|)` entrywise max; 0 when both vanish.
pub fn relative_residual(a: &Complex3Dyadic, b: &Complex3Dyadic) -> f64 {
    let scale = a.max_abs().max(b.max_abs());
    let diff = (*a - *b).max_abs();
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample(seed: f64) -> Complex3Dyadic {
        let mut d = Complex3Dyadic::zero();
        for i in 0..3 {
            for j in 0..3 {
                let t = seed + (3 * i + j) as f64;
                d.0[i][j] = c((1.3 * t).sin(), (0.7 * t + 0.2).cos());
            }
        }
        d
    }

    #[test]
    fn cross_matrix_matches_cross_product() {
        let a = [0.3, -1.2, 0.5];
        let v = Complex3Vector::new(c(1.0, 2.0), c(-0.5, 0.1), c(0.0, -1.0));
        let lhs = Complex3Dyadic::cross_matrix(a).apply(&v);
        let rhs = Complex3Vector::from_real(a).cross(&v);
        assert!((lhs - rhs).norm() < 1e-15);
    }

    #[test]
    fn left_apply_is_transpose_apply() {
        let d = sample(0.4);
        let v = Complex3Vector::new(c(0.2, 1.0), c(1.5, -0.3), c(-0.7, 0.0));
        assert!((d.left_apply(&v) - d.transpose().apply(&v)).norm() < 1e-15);
    }

    #[test]
    fn residual_of_identical_is_zero() {
        let d = sample(1.0);
        assert_eq!(relative_residual(&d, &d), 0.0);
        assert_eq!(relative_residual(&Complex3Dyadic::zero(), &Complex3Dyadic::zero()), 0.0);
    }

    #[test]
    fn projector_annihilates_direction() {
        let u = normalize3([1.0, 2.0, -2.0]).unwrap();
        let p = Complex3Dyadic::transverse_projector(u);
        assert!(p.left_apply_real(u).norm() < 1e-15);
        assert!((p.dot(&p) - p).max_abs() < 1e-15);
    }
}
