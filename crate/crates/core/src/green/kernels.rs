//! Closed-form `m`-sums of normalized vector spherical harmonics.
//!
//! With `P = r̂ Y`, `B = r∇Y/√(n(n+1))`, `C = B × r̂`, the kernels
//! `K^{XY}_n(r̂, ŝ) = Σ_m X_nm(r̂) ⊗ conj(Y_nm(ŝ))` reduce to Legendre functions of
//! `μ = r̂·ŝ`:
//!
//! ```text
//! K^PP = λ P_n r̂⊗ŝ            K^PB = (λ/ν) P_n' r̂⊗t_s
//! K^BP = (λ/ν) P_n' t_r⊗ŝ      K^BB = (λ/ν²)[P_n'' t_r⊗t_s + P_n' (I−r̂r̂)(I−ŝŝ)]
//! K^{C·} = −[r̂×] K^{B·}         K^{·C} = K^{·B} [ŝ×]
//! ```
//!
//! with `λ = (2n+1)/4π`, `ν = √(n(n+1))`, `t_r = ŝ − μr̂`, `t_s = r̂ − μŝ`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::numerics::linalg::{dot3, scale3, sub3, Complex3Dyadic, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    P,
    B,
    C,
}

/// `P_n`, `P_n'`, `P_n''` at a fixed argument.
#[derive(Debug, Clone)]
pub struct Legendre {
    pub p: Vec<f64>,
    pub dp: Vec<f64>,
    pub d2p: Vec<f64>,
}

impl Legendre {
    pub fn new(mu: f64, order: usize) -> Self {
        let n = order.max(1) + 1;
        let mut p = vec![0.0; n];
        let mut dp = vec![0.0; n];
        let mut d2p = vec![0.0; n];
        p[0] = 1.0;
        p[1] = mu;
        dp[1] = 1.0;
        for k in 1..n - 1 {
            let kf = k as f64;
            p[k + 1] = ((2.0 * kf + 1.0) * mu * p[k] - kf * p[k - 1]) / (kf + 1.0);
            dp[k + 1] = dp[k - 1] + (2.0 * kf + 1.0) * p[k];
            d2p[k + 1] = d2p[k - 1] + (2.0 * kf + 1.0) * dp[k];
        }
        Self { p, dp, d2p }
    }

    pub fn order(&self) -> usize {
        self.p.len() - 1
    }
}

/// Geometry of a direction pair.
#[derive(Debug, Clone, Copy)]
pub struct DirectionPair {
    pub r: Vec3,
    pub s: Vec3,
    pub mu: f64,
    tr: Vec3,
    ts: Vec3,
}

impl DirectionPair {
    pub fn new(r: Vec3, s: Vec3) -> Self {
        let mu = dot3(r, s).clamp(-1.0, 1.0);
        Self { r, s, mu, tr: sub3(s, scale3(mu, r)), ts: sub3(r, scale3(mu, s)) }
    }
}

/// Accumulates `Σ_n Σ_{X,Y} c^{XY}_n K^{XY}_n` as 20 scalar sums, assembled once.
#[derive(Debug, Clone, Default)]
pub struct KernelSum {
    // [left is C][right is C][PP, PB, BP, BB'', BB']
    sums: [[[Complex64; 5]; 2]; 2],
}

impl KernelSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, leg: &Legendre, n: usize, x: Family, y: Family, coef: Complex64) {
        if n == 0 {
            return;
        }
        let nf = n as f64;
        let lambda = (2.0 * nf + 1.0) / (4.0 * PI);
        let nu2 = nf * (nf + 1.0);
        let nu = nu2.sqrt();
        let slot = &mut self.sums[(x == Family::C) as usize][(y == Family::C) as usize];
        let lb = x != Family::P;
        let rb = y != Family::P;
        match (lb, rb) {
            (false, false) => slot[0] += coef * (lambda * leg.p[n]),
            (false, true) => slot[1] += coef * (lambda / nu * leg.dp[n]),
            (true, false) => slot[2] += coef * (lambda / nu * leg.dp[n]),
            (true, true) => {
                slot[3] += coef * (lambda / nu2 * leg.d2p[n]);
                slot[4] += coef * (lambda / nu2 * leg.dp[n]);
            }
        }
    }

    pub fn assemble(&self, d: &DirectionPair) -> Complex3Dyadic {
        let q = Complex3Dyadic::transverse_projector(d.r).dot(&Complex3Dyadic::transverse_projector(d.s));
        let dyads = [
            Complex3Dyadic::outer_real(d.r, d.s),
            Complex3Dyadic::outer_real(d.r, d.ts),
            Complex3Dyadic::outer_real(d.tr, d.s),
            Complex3Dyadic::outer_real(d.tr, d.ts),
            q,
        ];
        let left = -Complex3Dyadic::cross_matrix(d.r);
        let right = Complex3Dyadic::cross_matrix(d.s);
        let mut out = Complex3Dyadic::zero();
        for lc in 0..2 {
            for rc in 0..2 {
                let s = &self.sums[lc][rc];
                if s.iter().all(|c| *c == Complex64::new(0.0, 0.0)) {
                    continue;
                }
                let mut part = Complex3Dyadic::zero();
                for (c, dy) in s.iter().zip(&dyads) {
                    part += dy.scale(*c);
                }
                if lc == 1 {
                    part = left.dot(&part);
                }
                if rc == 1 {
                    part = part.dot(&right);
                }
                out += part;
            }
        }
        out
    }
}

/// Radial factors of one vector spherical wave at order `n`:
/// `M = z C`, `N = a P + b B`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Radial {
    pub z: Complex64,
    pub a: Complex64,
    pub b: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wave {
    M,
    N,
}

impl Wave {
    pub fn dual(self) -> Self {
        match self {
            Wave::M => Wave::N,
            Wave::N => Wave::M,
        }
    }
}

/// Adds `coef · Σ_m U_nm(r) ⊗ conj_angular(V_nm(s))`.
pub fn add_bilinear(
    acc: &mut KernelSum,
    leg: &Legendre,
    n: usize,
    coef: Complex64,
    (u, ru): (Wave, &Radial),
    (v, rv): (Wave, &Radial),
) {
    let parts = |w: Wave, r: &Radial| -> [(Family, Complex64); 2] {
        match w {
            Wave::M => [(Family::C, r.z), (Family::P, Complex64::new(0.0, 0.0))],
            Wave::N => [(Family::P, r.a), (Family::B, r.b)],
        }
    };
    for (fx, cx) in parts(u, ru) {
        if cx == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (fy, cy) in parts(v, rv) {
            if cy == Complex64::new(0.0, 0.0) {
                continue;
            }
            acc.add(leg, n, fx, fy, coef * cx * cy);
        }
    }
}

#[cfg(test)]
pub(crate) mod oracle {
    //! Explicit `Y_nm` and vector harmonics, used only to validate the closed forms.

    use super::*;
    use crate::numerics::linalg::Complex3Vector;

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    /// Associated Legendre `P_n^m(x)` with Condon–Shortley phase, `m ≥ 0`.
    fn assoc_legendre(n: usize, m: usize, x: f64) -> f64 {
        let mut pmm = 1.0;
        let s = (1.0 - x * x).max(0.0).sqrt();
        let mut fact = 1.0;
        for _ in 0..m {
            pmm *= -fact * s;
            fact += 2.0;
        }
        if n == m {
            return pmm;
        }
        let mut pmm1 = x * (2 * m + 1) as f64 * pmm;
        if n == m + 1 {
            return pmm1;
        }
        let mut out = 0.0;
        for l in m + 2..=n {
            out = (x * (2 * l - 1) as f64 * pmm1 - (l + m - 1) as f64 * pmm) / (l - m) as f64;
            pmm = pmm1;
            pmm1 = out;
        }
        out
    }

    pub fn ylm(n: usize, m: i64, u: Vec3) -> Complex64 {
        let u = crate::numerics::linalg::normalize3(u).expect("nonzero direction");
        let theta = u[2].clamp(-1.0, 1.0).acos();
        let phi = u[1].atan2(u[0]);
        let am = m.unsigned_abs() as usize;
        let norm = ((2 * n + 1) as f64 / (4.0 * PI) * factorial(n - am) / factorial(n + am)).sqrt();
        let base = norm * assoc_legendre(n, am, theta.cos()) * Complex64::from_polar(1.0, am as f64 * phi);
        if m >= 0 {
            base
        } else {
            base.conj() * if am % 2 == 0 { 1.0 } else { -1.0 }
        }
    }

    /// `P`, `B`, `C` by central differences of `Y` on the sphere.
    pub fn vsh(n: usize, m: i64, u: Vec3) -> [Complex3Vector; 3] {
        let h = 1e-5;
        let mut grad = [Complex64::new(0.0, 0.0); 3];
        for (i, g) in grad.iter_mut().enumerate() {
            let mut up = u;
            let mut dn = u;
            up[i] += h;
            dn[i] -= h;
            // Y(u/|u|) is constant along u, so this is the tangential gradient.
            *g = (ylm(n, m, up) - ylm(n, m, dn)) / (2.0 * h);
        }
        let nu = ((n * (n + 1)) as f64).sqrt();
        let y = ylm(n, m, u);
        let p = Complex3Vector::from_real(u).scale(y);
        let tang = |g: [Complex64; 3]| {
            let radial: Complex64 = (0..3).map(|i| g[i] * u[i]).sum();
            Complex3Vector([g[0] - radial * u[0], g[1] - radial * u[1], g[2] - radial * u[2]])
        };
        let b = tang(grad).scale(Complex64::new(1.0 / nu, 0.0));
        let c = b.cross(&Complex3Vector::from_real(u));
        [p, b, c]
    }

    pub fn kernel(n: usize, x: Family, y: Family, r: Vec3, s: Vec3) -> Complex3Dyadic {
        let idx = |f: Family| match f {
            Family::P => 0,
            Family::B => 1,
            Family::C => 2,
        };
        let mut out = Complex3Dyadic::zero();
        for m in -(n as i64)..=(n as i64) {
            let a = vsh(n, m, r)[idx(x)];
            let b = vsh(n, m, s)[idx(y)].conj();
            out += a.outer(&b);
        }
        out
    }
}
