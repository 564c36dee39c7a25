//! Frequency integrals of `Im 𝒢_vac` and the stationary-phase lemma for
//! oscillatory direction integrals.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{Check, CheckConfig};
use crate::green::closed_form::{vacuum_im_closed_form, ClosedForm};
use crate::green::{Geometry, GreenFunction};
use crate::numerics::linalg::{dot3, norm3, normalize3, relative_residual, scale3, sub3, Complex3Dyadic, Vec3};
use crate::numerics::{line_integrate_regularized_with, sphere_quadrature, LineOptions, NumericsError, SolidAngle};
use crate::report::IdentityReport;

struct FrequencyProblem {
    c: f64,
    sep: Vec3,
    omega: f64,
    omega2: f64,
}

/// Left-hand sides, each already reduced to a real dyadic.
struct Sides {
    i1: Complex3Dyadic,
    i2: Complex3Dyadic,
    i3: Complex3Dyadic,
    i4: Complex3Dyadic,
    error: f64,
}

impl FrequencyProblem {
    fn im_g(&self, w: f64) -> Complex3Dyadic {
        vacuum_im_closed_form(w / self.c, self.sep)
    }

    fn g(&self, w: f64) -> Complex3Dyadic {
        ClosedForm::vacuum(w / self.c).value(self.sep)
    }

    /// Quasi-static coefficient: `𝒢_ω → C/ω²` as `ω → 0`.
    fn static_pole(&self) -> Complex3Dyadic {
        let r = norm3(self.sep);
        let e = scale3(1.0 / r, self.sep);
        let d = Complex3Dyadic::identity() - Complex3Dyadic::outer_real(e, e).scale_re(3.0);
        d.scale_re(-self.c * self.c / (4.0 * PI * r.powi(3)))
    }

    fn integrate(&self, deltas: &[f64], cutoff: f64) -> Result<Sides, NumericsError> {
        let (o1, o2) = (self.omega, self.omega2);
        let i = Complex64::new(0.0, 1.0);
        let half_periods = cutoff * norm3(self.sep) / (PI * self.c);
        let opts = LineOptions {
            breakpoints: vec![o1, o2],
            initial_panels: (2.0 * half_periods).clamp(64.0, 20_000.0) as usize,
            rel_tol: 1e-11,
            ..Default::default()
        };
        let eta = |d: f64| d * o1 * o1;
        let i1 = line_integrate_regularized_with(|w, _| self.im_g(w).scale_re(w), deltas, cutoff, &opts)?;
        let den2 = |w: f64, d: f64| {
            let z = Complex64::new(w, 0.0);
            (o1 * o1 - (z + i * eta(d)).powi(2)) * (o2 * o2 - (z - i * eta(d)).powi(2))
        };
        let i2 = line_integrate_regularized_with(
            |w, d| self.im_g(w).scale(Complex64::new(2.0 * w / PI, 0.0) / den2(w, d)),
            deltas,
            cutoff,
            &opts,
        )?;
        let i3 = line_integrate_regularized_with(
            |w, d| self.im_g(w).scale(Complex64::new(2.0 * w.powi(3) / PI, 0.0) / den2(w, d)),
            deltas,
            cutoff,
            &opts,
        )?;
        let i4 = line_integrate_regularized_with(
            |w, d| {
                let den = o1 * o1 - (Complex64::new(w, 0.0) - i * eta(d)).powi(2);
                self.im_g(w).scale(Complex64::new(2.0 * w / PI, 0.0) / den)
            },
            deltas,
            cutoff,
            &opts,
        )?;
        let error = [i1.error, i2.error, i3.error, i4.error].into_iter().fold(0.0, f64::max);
        Ok(Sides { i1: i1.value.re(), i2: i2.value.re(), i3: i3.value.re(), i4: i4.value.re(), error })
    }
}

/// The four regularized frequency integrals of `Im 𝒢_vac` against the
/// right-hand sides obtained by closing the contour in the upper half plane.
///
/// The stated right-hand sides omit the half-residue of the `ω = 0` quasi-static
/// pole of `𝒢_ω`; residuals against the right-hand sides with that contribution
/// restored are recorded as `corrected_*` parameters.
pub fn verify_frequency_integrals(config: &CheckConfig) -> IdentityReport {
    let tol = config.tolerance(Check::FrequencyIntegrals);
    let mut report = IdentityReport::new(Check::FrequencyIntegrals.name(), tol);
    let fs = &config.frequency;
    let c = config.constants.c;
    let omega = config.omegas[0];
    let (r, rp) = config.pairs[0];
    let dir = normalize3(sub3(r, rp)).expect("distinct pair points");
    let sep = scale3(fs.separation_kr * c / omega, dir);
    let p = FrequencyProblem { c, sep, omega, omega2: fs.omega_ratio * omega };
    let deltas: Vec<f64> = fs.regulators.iter().map(|d| d / omega).collect();
    let cutoff = fs.cutoff_factor / deltas[deltas.len() - 1];
    report
        .param("omega", omega)
        .param("omega_prime", p.omega2)
        .param("kR", fs.separation_kr)
        .param("cutoff", cutoff);

    let (o1, o2) = (p.omega, p.omega2);
    let (g1, g2) = (p.g(o1), p.g(o2));
    let stated = [
        Complex3Dyadic::zero(),
        -(g1.scale_re(1.0 / (o2 * o2 - o1 * o1)) + g2.scale_re(1.0 / (o1 * o1 - o2 * o2))).re(),
        -(g1.scale_re(o1 * o1 / (o2 * o2 - o1 * o1)) + g2.scale_re(o2 * o2 / (o1 * o1 - o2 * o2))).re(),
        -g1.re(),
    ];
    let cpole = p.static_pole();
    let corrected = [
        cpole.scale_re(PI / 2.0),
        stated[1] + cpole.scale_re(1.0 / (o1 * o1 * o2 * o2)),
        stated[2],
        stated[3] + cpole.scale_re(1.0 / (o1 * o1)),
    ];
    let i1_scale = PI * c * c / (2.0 * norm3(sep).powi(3));

    let residuals = |s: &Sides, rhs: &[Complex3Dyadic; 4]| -> [f64; 4] {
        [
            (s.i1 - rhs[0]).max_abs() / i1_scale,
            relative_residual(&s.i2, &rhs[1]),
            relative_residual(&s.i3, &rhs[2]),
            relative_residual(&s.i4, &rhs[3]),
        ]
    };
    let mut finest: Option<Sides> = None;
    for (level, factor) in [1.0, 2.0].into_iter().enumerate() {
        match p.integrate(&deltas, factor * cutoff) {
            Ok(sides) => {
                let res = residuals(&sides, &stated);
                report.push_sweep(level as u32, res.into_iter().fold(0.0, f64::max));
                if let Some(prev) = &finest {
                    let change = [
                        (sides.i1 - prev.i1).max_abs() / i1_scale,
                        relative_residual(&sides.i2, &prev.i2),
                        relative_residual(&sides.i3, &prev.i3),
                        relative_residual(&sides.i4, &prev.i4),
                    ];
                    report.param("cutoff_sensitivity", change.into_iter().fold(0.0, f64::max));
                }
                finest = Some(sides);
            }
            Err(e) => report.fail(format!("cutoff x{factor}: {e}")),
        }
    }
    if let Some(s) = &finest {
        let res = residuals(s, &stated);
        let fixed = residuals(s, &corrected);
        for (k, name) in ["i1", "i2", "i3", "i4"].iter().enumerate() {
            report.param(&format!("{name}_residual"), res[k]);
            report.param(&format!("corrected_{name}_residual"), fixed[k]);
        }
        report.param("extrapolation_error", s.error);
    }
    report.finish_from_sweep()
}

/// `|ξ ∫ do e^{iξ n·u} f(u) − 2πi[e^{−iξ} f(−n) − e^{iξ} f(n)]|`, entrywise max,
/// with the direction integral taken by a degree-`degree` sphere rule.
pub fn jones_remainder(
    f: &dyn Fn(Vec3) -> Complex3Dyadic,
    n: Vec3,
    xi: f64,
    degree: usize,
) -> Result<f64, NumericsError> {
    let rule = sphere_quadrature(degree)?;
    let mut sum = Complex3Dyadic::zero();
    for (u, w) in rule.points() {
        sum += f(u).scale(Complex64::new(0.0, xi * dot3(n, u)).exp() * w);
    }
    let i = Complex64::new(0.0, 1.0);
    let lead = (f(scale3(-1.0, n)).scale((-i * xi).exp()) - f(n).scale((i * xi).exp())).scale(2.0 * PI * i);
    Ok((sum.scale_re(xi) - lead).max_abs())
}

/// Convergence order of the stationary-phase remainder between `ξ` and `2ξ`
/// for `f(o) = 𝒲_vac(o, r′)`.
pub fn verify_jones_lemma(config: &CheckConfig) -> IdentityReport {
    let tol = config.tolerance(Check::JonesLemma);
    let mut report = IdentityReport::new(Check::JonesLemma.name(), tol);
    let xi = config.jones.xi;
    let n = match normalize3(config.jones.direction) {
        Some(n) => n,
        None => {
            report.fail("stationary direction must be nonzero");
            return report.finish();
        }
    };
    let run = |report: &mut IdentityReport| -> Result<(), String> {
        let g = GreenFunction::with_constants(&Geometry::Vacuum, config.omegas[0], config.constants)
            .map_err(|e| e.to_string())?;
        let rp = config.pairs[0].1;
        let f = |u: Vec3| -> Complex3Dyadic {
            let o = SolidAngle::from_vector(u).expect("unit vector");
            g.farfield(&o, rp).expect("vacuum far field").W
        };
        let reach = g.k0() * norm3(rp);
        let mut ratio = f64::NAN;
        for (level, extra) in [40.0, 64.0].into_iter().enumerate() {
            let degree = |x: f64| (x + reach + extra).ceil() as usize;
            let r1 = jones_remainder(&f, n, xi, degree(xi)).map_err(|e| e.to_string())?;
            let r2 = jones_remainder(&f, n, 2.0 * xi, degree(2.0 * xi)).map_err(|e| e.to_string())?;
            ratio = r1 / r2;
            report.push_sweep(level as u32, (ratio - 4.0).abs() / 4.0);
            report.param("remainder_xi", r1).param("remainder_2xi", r2).param("degree_2xi", degree(2.0 * xi));
        }
        report.param("ratio", ratio).param("xi", xi);
        Ok(())
    };
    if let Err(e) = run(&mut report) {
        report.fail(e);
    }
    report.finish_from_sweep()
}
