//! Finite-difference oracles shared by unit tests.

use crate::numerics::linalg::{add3, scale3, Complex3Dyadic, Complex3Vector, Vec3};

fn stencil<T>(f: &dyn Fn(Vec3) -> T, r: Vec3, h: f64, k: usize) -> T
where
    T: std::ops::Sub<Output = T> + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let mut e = [0.0; 3];
    e[k] = h;
    let at = |t: f64| f(add3(r, scale3(t, e)));
    (at(-2.0) - at(2.0) + (at(1.0) - at(-1.0)) * 8.0) * (1.0 / (12.0 * h))
}

/// `∇ × D` acting on the first index, fourth-order central differences.
pub fn fd_curl(f: &dyn Fn(Vec3) -> Complex3Dyadic, r: Vec3, h: f64) -> Complex3Dyadic {
    let d: Vec<Complex3Dyadic> = (0..3).map(|k| stencil(f, r, h, k)).collect();
    let mut out = Complex3Dyadic::zero();
    for j in 0..3 {
        out.0[0][j] = d[1].0[2][j] - d[2].0[1][j];
        out.0[1][j] = d[2].0[0][j] - d[0].0[2][j];
        out.0[2][j] = d[0].0[1][j] - d[1].0[0][j];
    }
    out
}

pub fn fd_curl_vector(f: &dyn Fn(Vec3) -> Complex3Vector, r: Vec3, h: f64) -> Complex3Vector {
    let d: Vec<Complex3Vector> = (0..3).map(|k| stencil(f, r, h, k)).collect();
    Complex3Vector([d[1].0[2] - d[2].0[1], d[2].0[0] - d[0].0[2], d[0].0[1] - d[1].0[0]])
}
