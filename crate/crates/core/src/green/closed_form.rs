//! Free-space dyadic Green's function of a homogeneous medium.
//!
//! `𝒢 = μ e^{is}/(4πR) [(1 + i/s − 1/s²) I + (−1 − 3i/s + 3/s²) R̂R̂]`, `s = k̃R`,
//! solving `(∇×μ⁻¹∇× − k²ε)𝒢 = δI` with `k̃ = k√(εμ)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::GreenEval;
use crate::numerics::linalg::{norm3, scale3, Complex3Dyadic, Vec3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForm {
    /// Wavenumber in the medium, `Im k ≥ 0`.
    pub k: Complex64,
    /// Overall prefactor (the medium permeability).
    pub mu: Complex64,
}

impl ClosedForm {
    pub fn vacuum(k0: f64) -> Self {
        Self { k: Complex64::new(k0, 0.0), mu: Complex64::new(1.0, 0.0) }
    }

    /// Medium with relative `eps`, `mu` at vacuum wavenumber `k0`.
    pub fn medium(k0: f64, eps: Complex64, mu: Complex64) -> Self {
        Self { k: k0 * medium_index(eps, mu), mu }
    }

    /// Value and both curls at separation `R = r − r′ ≠ 0`.
    pub fn eval(&self, sep: Vec3) -> GreenEval {
        let (value, g1, e) = self.parts(sep);
        let curl = Complex3Dyadic::cross_matrix(e).scale(self.mu * g1);
        GreenEval { value, curl_r: curl, curl_rprime: -curl }
    }

    pub fn value(&self, sep: Vec3) -> Complex3Dyadic {
        self.parts(sep).0
    }

    fn parts(&self, sep: Vec3) -> (Complex3Dyadic, Complex64, Vec3) {
        let i = Complex64::new(0.0, 1.0);
        let r = norm3(sep);
        let e = scale3(1.0 / r, sep);
        let s = self.k * r;
        let g = (i * s).exp() / (4.0 * PI * r);
        let (is, is2) = (1.0 / s, 1.0 / (s * s));
        let a = 1.0 + i * is - is2;
        let b = -1.0 - 3.0 * i * is + 3.0 * is2;
        let value = (Complex3Dyadic::identity().scale(a) + Complex3Dyadic::outer_real(e, e).scale(b)).scale(self.mu * g);
        // d/dR of the scalar kernel e^{ikR}/(4πR).
        let g1 = g * (i * self.k - 1.0 / r);
        (value, g1, e)
    }
}

/// `√(εμ)` on the branch with `Im ≥ 0`, ties broken toward `Re > 0`.
pub fn medium_index(eps: Complex64, mu: Complex64) -> Complex64 {
    let w = (eps * mu).sqrt();
    if w.im < 0.0 || (w.im == 0.0 && w.re < 0.0) {
        -w
    } else {
        w
    }
}

/// `Im 𝒢_vac` written with `sin s`, `cos s` (real `k`), switching to the Taylor
/// series below `s = 10⁻²` where the closed form cancels.
pub fn vacuum_im_closed_form(k: f64, sep: Vec3) -> Complex3Dyadic {
    let r = norm3(sep);
    let e = scale3(1.0 / r, sep);
    let s = k * r;
    let (f1, f2) = if s < 1e-2 {
        let s2 = s * s;
        (2.0 / 3.0 - 2.0 * s2 / 15.0 + s2 * s2 / 140.0, s2 / 15.0 - s2 * s2 / 210.0)
    } else {
        let (sn, cs) = s.sin_cos();
        (sn / s + cs / (s * s) - sn / (s * s * s), -sn / s - 3.0 * cs / (s * s) + 3.0 * sn / (s * s * s))
    };
    let pref = k / (4.0 * PI);
    Complex3Dyadic::identity().scale_re(pref * f1) + Complex3Dyadic::outer_real(e, e).scale_re(pref * f2)
}

/// `Im 𝒢_vac` from its small-`s` Taylor expansion through `s⁴`.
pub fn vacuum_im_taylor(k: f64, sep: Vec3) -> Complex3Dyadic {
    let r = norm3(sep);
    let e = scale3(1.0 / r, sep);
    let s2 = (k * r).powi(2);
    let pref = k / (4.0 * PI);
    Complex3Dyadic::identity().scale_re(pref * (2.0 / 3.0 - 2.0 * s2 / 15.0 + s2 * s2 / 140.0))
        + Complex3Dyadic::outer_real(e, e).scale_re(pref * (s2 / 15.0 - s2 * s2 / 210.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::linalg::{relative_residual, sub3};
    use crate::test_support::fd_curl;

    #[test]
    fn vacuum_matches_written_form() {
        let k = 2.0;
        let sep = [0.3, -0.4, 0.5];
        let r = norm3(sep);
        let s = k * r;
        let i = Complex64::new(0.0, 1.0);
        let g = ClosedForm::vacuum(k).value(sep);
        let e = scale3(1.0 / r, sep);
        for a in 0..3 {
            for b in 0..3 {
                let delta = if a == b { 1.0 } else { 0.0 };
                let term = (i * s).exp() / (4.0 * PI * r)
                    * ((1.0 + i / s - 1.0 / (s * s)) * delta + (-1.0 - 3.0 * i / s + 3.0 / (s * s)) * e[a] * e[b]);
                assert!((g.0[a][b] - term).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn im_part_closed_form_agrees() {
        for &s in &[0.5, 1.0, std::f64::consts::FRAC_PI_2, 5.0, 10.0] {
            let sep = scale3(s / 3.0, [0.6, 0.0, 0.8]);
            let g = ClosedForm::vacuum(3.0).value(sep).im();
            assert!(relative_residual(&g, &vacuum_im_closed_form(3.0, sep)) < 1e-13);
        }
    }

    #[test]
    fn curls_match_finite_differences() {
        let cf = ClosedForm::medium(1.3, Complex64::new(2.0, 0.5), Complex64::new(1.4, 0.2));
        let r = [0.4, 0.1, -0.3];
        let rp = [-0.2, 0.5, 0.2];
        let ev = cf.eval(sub3(r, rp));
        let fd = fd_curl(&|x| cf.value(sub3(x, rp)), r, 1e-3);
        assert!(relative_residual(&ev.curl_r, &fd) < 1e-9);
        // curl_rprime = −[∇′ × 𝒢(r′, r)]ᵀ
        let fdp = fd_curl(&|x| cf.value(sub3(x, r)), rp, 1e-3).transpose();
        assert!(relative_residual(&ev.curl_rprime, &(-fdp)) < 1e-9);
    }

    #[test]
    fn helmholtz_residual_vanishes() {
        // (1/μ)∇×∇×𝒢 − k²ε𝒢 = 0 away from the source, with k²εμ = k̃².
        let k0 = 2.0 * PI;
        let (eps, mu) = (Complex64::new(2.0, 1.0), Complex64::new(1.5, 0.3));
        let cf = ClosedForm::medium(k0, eps, mu);
        let rp = [0.0, 0.0, 0.0];
        let r = [0.31, -0.22, 0.4];
        let h = 1e-4; // λ = 1
        let curl = |x: Vec3| cf.eval(sub3(x, rp)).curl_r;
        let cc = fd_curl(&curl, r, h);
        let g = cf.value(sub3(r, rp));
        let res = cc.scale(1.0 / mu) - g.scale(Complex64::new(k0 * k0, 0.0) * eps);
        assert!(res.max_abs() < 1e-6 * cc.max_abs(), "{}", res.max_abs() / cc.max_abs());
    }

    #[test]
    fn branch_has_nonnegative_imaginary_part() {
        let w = medium_index(Complex64::new(-3.0, 0.1), Complex64::new(1.0, 0.1));
        assert!(w.im >= 0.0);
        let w = medium_index(Complex64::new(4.0, 0.0), Complex64::new(1.0, 0.0));
        assert_eq!(w, Complex64::new(2.0, 0.0));
    }

    #[test]
    fn small_separation_limit() {
        let k = 1.0;
        let sep = [0.0, 0.006, 0.008];
        let g = ClosedForm::vacuum(k).value(sep).im();
        assert!(relative_residual(&g, &vacuum_im_taylor(k, sep)) < 1e-9);
        let lim = Complex3Dyadic::identity().scale_re(k / (6.0 * PI));
        assert!(relative_residual(&g, &lim) < 1e-4);
    }
}
