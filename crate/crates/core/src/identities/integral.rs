//! Identities balancing a lossy-volume integral against direction integrals
//! over far-field amplitudes or scattering modes.

use std::f64::consts::PI;

use super::{Check, CheckConfig, QuadratureLevel, SweepMax};
use crate::green::closed_form::vacuum_im_closed_form;
use crate::green::{Geometry, GreenFunction};
use crate::modes::mode_dyadic;
use crate::numerics::linalg::{norm3, relative_residual, sub3, Complex3Dyadic, Vec3};
use crate::numerics::quadrature::gauss_legendre_interval;
use crate::numerics::{sphere_quadrature, PhysicalConstants};
use crate::report::IdentityReport;

type Pairs = [(Vec3, Vec3)];

/// Distinct points of `pairs` and, per pair, the indices of its two points.
fn index_points(pairs: &Pairs) -> (Vec<Vec3>, Vec<(usize, usize)>) {
    let mut pts: Vec<Vec3> = Vec::new();
    let mut find = |p: Vec3| match pts.iter().position(|q| *q == p) {
        Some(i) => i,
        None => {
            pts.push(p);
            pts.len() - 1
        }
    };
    let idx = pairs.iter().map(|&(r, rp)| (find(r), find(rp))).collect();
    (pts, idx)
}

/// `Σ_λ ∫_V d³s 𝒜_λ(r, s)·𝒜_λ†(r′, s)` for each pair.
pub(super) fn volume_term(g: &GreenFunction, pairs: &Pairs, level: QuadratureLevel) -> Result<Vec<Complex3Dyadic>, String> {
    let mut acc = vec![Complex3Dyadic::zero(); pairs.len()];
    let Some(a) = g.geometry().radius().filter(|_| g.scatters()) else {
        return Ok(acc);
    };
    let radial = gauss_legendre_interval(level.radial, 0.0, a).map_err(|e| e.to_string())?;
    let rule = sphere_quadrature(level.angular).map_err(|e| e.to_string())?;
    let (pts, idx) = index_points(pairs);
    let mut aux = vec![(Complex3Dyadic::zero(), Complex3Dyadic::zero()); pts.len()];
    for &(rho, wr) in &radial {
        for (u, wu) in rule.points() {
            let s = [rho * u[0], rho * u[1], rho * u[2]];
            let w = wr * rho * rho * wu;
            for (slot, &p) in aux.iter_mut().zip(&pts) {
                *slot = g.aux(p, s).map_err(|e| format!("volume point {s:?}: {e}"))?;
            }
            for (sum, &(i, j)) in acc.iter_mut().zip(&idx) {
                let (ei, mi) = aux[i];
                let (ej, mj) = aux[j];
                *sum += (ei.dot(&ej.adjoint()) + mi.dot(&mj.adjoint())).scale_re(w);
            }
        }
    }
    Ok(acc)
}

/// `k ∫ do 𝒲ᵀ(o, r)·𝒲*(o, r′)` for each pair.
pub(super) fn surface_term(g: &GreenFunction, pairs: &Pairs, degree: usize) -> Result<Vec<Complex3Dyadic>, String> {
    let rule = sphere_quadrature(degree).map_err(|e| e.to_string())?;
    let (pts, idx) = index_points(pairs);
    let mut acc = vec![Complex3Dyadic::zero(); pairs.len()];
    let mut w = vec![Complex3Dyadic::zero(); pts.len()];
    for (o, &wo) in rule.nodes.iter().zip(&rule.weights) {
        for (slot, &p) in w.iter_mut().zip(&pts) {
            *slot = g.farfield(o, p).map_err(|e| format!("far field from {p:?}: {e}"))?.W;
        }
        for (sum, &(i, j)) in acc.iter_mut().zip(&idx) {
            *sum += w[i].transpose().dot(&w[j].conj()).scale_re(wo);
        }
    }
    Ok(acc.into_iter().map(|d| d.scale_re(g.k0())).collect())
}

/// `∫ do_n Σ_ν F⁽ˢ⁾_{nν}(r) ⊗ F⁽ˢ⁾*_{nν}(r′)` for each pair.
pub(super) fn mode_term(g: &GreenFunction, pairs: &Pairs, degree: usize) -> Result<Vec<Complex3Dyadic>, String> {
    let rule = sphere_quadrature(degree).map_err(|e| e.to_string())?;
    let (pts, idx) = index_points(pairs);
    let mut acc = vec![Complex3Dyadic::zero(); pairs.len()];
    let mut d = vec![Complex3Dyadic::zero(); pts.len()];
    for (n, wn) in rule.points() {
        for (slot, &p) in d.iter_mut().zip(&pts) {
            *slot = mode_dyadic(g, n, p).map_err(|e| format!("mode at {p:?}: {e}"))?;
        }
        let transverse = Complex3Dyadic::transverse_projector(n);
        for (sum, &(i, j)) in acc.iter_mut().zip(&idx) {
            *sum += d[i].dot(&transverse).dot(&d[j].adjoint()).scale_re(wn);
        }
    }
    Ok(acc)
}

fn im_green(g: &GreenFunction, pairs: &Pairs) -> Result<Vec<Complex3Dyadic>, String> {
    pairs.iter().map(|&(r, rp)| g.value(r, rp).map(|v| v.im()).map_err(|e| e.to_string())).collect()
}

/// Order at which the Mie series of every configured point has converged:
/// the Wiscombe-type estimate `x + 4x^{1/3} + 2` plus a margin.
fn truncation_order(g: &GreenFunction, points: &[Vec3]) -> usize {
    let reach = points.iter().map(|p| norm3(*p)).fold(g.geometry().radius().unwrap_or(0.0), f64::max);
    let inner = g.sphere().map(|c| c.k1.norm() * c.radius).unwrap_or(0.0);
    let x = (g.k0() * reach).max(inner).max(1.0);
    (x + 4.0 * x.cbrt() + 2.0).ceil() as usize + 4
}

fn green_at(config: &CheckConfig, omega: f64) -> Result<GreenFunction, String> {
    GreenFunction::with_constants(&config.geometry, omega, config.constants).map_err(|e| e.to_string())
}

fn max_norm(ds: &[Complex3Dyadic]) -> f64 {
    ds.iter().map(Complex3Dyadic::max_abs).fold(0.0, f64::max)
}

fn worst_residual(a: &[Complex3Dyadic], b: &[Complex3Dyadic]) -> f64 {
    a.iter().zip(b).map(|(x, y)| relative_residual(x, y)).fold(0.0, f64::max)
}

/// `k ∫ do 𝒲ᵀ(o, r)·𝒲*(o, r′)` by sphere quadrature against `Im 𝒢(r, r′)` and the
/// sin/cos closed form, all in vacuum. Swept over the direction degree.
pub fn verify_vacuum_closed_form(
    omega: f64,
    r: Vec3,
    rprime: Vec3,
    constants: &PhysicalConstants,
    tolerance: f64,
) -> IdentityReport {
    let mut report = IdentityReport::new(Check::VacuumClosedForm.name(), tolerance);
    let run = |report: &mut IdentityReport| -> Result<(), String> {
        let g = GreenFunction::with_constants(&Geometry::Vacuum, omega, *constants).map_err(|e| e.to_string())?;
        let k = g.k0();
        let sep = sub3(r, rprime);
        let s = k * norm3(sep);
        report.param("kR", s);
        let closed = vacuum_im_closed_form(k, sep);
        let direct = g.value(r, rprime).map_err(|e| e.to_string())?.im();
        let base = s.ceil() as usize + 12;
        for (level, degree) in [base, base + 8, base + 16].into_iter().enumerate() {
            let quad = surface_term(&g, &[(r, rprime)], degree)?[0];
            let worst = relative_residual(&quad, &closed)
                .max(relative_residual(&quad, &direct))
                .max(relative_residual(&closed, &direct));
            report.push_sweep(level as u32, worst);
            report.param("degree", degree);
        }
        Ok(())
    };
    if let Err(e) = run(&mut report) {
        report.fail(e);
    }
    report.finish_from_sweep()
}

fn fundamental(config: &CheckConfig, include_volume: bool) -> IdentityReport {
    let check = Check::FundamentalRelation;
    let name = if include_volume { check.name().to_owned() } else { format!("{}_without_volume", check.name()) };
    let mut report = IdentityReport::new(name, config.tolerance(check));
    if matches!(config.geometry, Geometry::Homogeneous { .. }) {
        report.fail("needs a vacuum exterior");
        return report.finish();
    }
    let mut sweep = SweepMax::default();
    let (mut vol_norm, mut surf_norm, mut rhs_norm, mut surf_only) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for &omega in &config.omegas {
        let run = |sweep: &mut SweepMax| -> Result<[f64; 4], String> {
            let g = green_at(config, omega)?;
            let rhs = im_green(&g, &config.pairs)?;
            let mut norms = [0.0; 4];
            for (level, &q) in config.levels.iter().enumerate() {
                let surface = surface_term(&g, &config.pairs, q.angular)?;
                let lhs: Vec<Complex3Dyadic> = if include_volume {
                    let volume = volume_term(&g, &config.pairs, q)?;
                    norms[0] = max_norm(&volume);
                    volume.iter().zip(&surface).map(|(v, s)| *v + *s).collect()
                } else {
                    surface.clone()
                };
                sweep.record(level, worst_residual(&lhs, &rhs));
                norms[1] = max_norm(&surface);
                norms[2] = max_norm(&rhs);
                norms[3] = worst_residual(&surface, &rhs);
            }
            Ok(norms)
        };
        match run(&mut sweep) {
            Ok([v, s, r, so]) => {
                vol_norm = vol_norm.max(v);
                surf_norm = surf_norm.max(s);
                rhs_norm = rhs_norm.max(r);
                surf_only = surf_only.max(so);
            }
            Err(e) => report.fail(format!("omega={omega:e}: {e}")),
        }
    }
    if include_volume {
        report.param("volume_norm", vol_norm);
    }
    report
        .param("surface_norm", surf_norm)
        .param("rhs_norm", rhs_norm)
        .param("surface_only_residual", surf_only)
        .param("pairs", config.pairs.len());
    sweep.into_report(&mut report);
    report.finish_from_sweep()
}

/// Volume term over the lossy sample plus far-field surface term against `Im 𝒢`.
pub fn verify_fundamental_relation(config: &CheckConfig) -> IdentityReport {
    fundamental(config, true)
}

/// The same balance with the volume term left out: holds in vacuum, fails for
/// an absorbing sample.
pub fn verify_fundamental_relation_without_volume(config: &CheckConfig) -> IdentityReport {
    fundamental(config, false)
}

/// Pairs for the completeness check: the exterior pairs, then interior and
/// interior–exterior combinations.
fn completeness_pairs(config: &CheckConfig) -> Vec<(Vec3, Vec3)> {
    let mut pairs = config.pairs.clone();
    let inner = &config.interior_points;
    if inner.len() >= 2 {
        pairs.push((inner[0], inner[1]));
    }
    if let Some(&p) = inner.first() {
        pairs.push((p, config.pairs[0].1));
    }
    pairs
}

/// `∫ do_n Σ_ν F⁽ˢ⁾(r) ⊗ F⁽ˢ⁾*(r′) = 16π² ∫ do 𝒲ᵀ(o, r)·𝒲*(o, r′)`, plus the same
/// balance for the ħ-scaled modes.
pub fn verify_mode_completeness(config: &CheckConfig) -> IdentityReport {
    let tol = config.tolerance(Check::ModeCompleteness);
    let mut report = IdentityReport::new(Check::ModeCompleteness.name(), tol);
    if matches!(config.geometry, Geometry::Homogeneous { .. }) {
        report.fail("scattering modes need a vacuum background");
        return report.finish();
    }
    let pairs = completeness_pairs(config);
    let mut sweep = SweepMax::default();
    let mut scaled: f64 = 0.0;
    for &omega in &config.omegas {
        let run = |sweep: &mut SweepMax, scaled: &mut f64, report: &mut IdentityReport| -> Result<(), String> {
            let g = green_at(config, omega)?;
            let points: Vec<Vec3> = pairs.iter().flat_map(|&(r, rp)| [r, rp]).collect();
            let order = truncation_order(&g, &points);
            report.param("truncation_order", order);
            for (level, f) in config.mode_degree_factors.iter().enumerate() {
                let degree = (f * order as f64).ceil() as usize;
                let modes = mode_term(&g, &pairs, degree)?;
                let rhs: Vec<Complex3Dyadic> = surface_term(&g, &pairs, degree)?
                    .into_iter()
                    .map(|s| s.scale_re(16.0 * PI * PI / g.k0()))
                    .collect();
                sweep.record(level, worst_residual(&modes, &rhs));
                report.param("degree", degree);
                let c = &config.constants;
                let e_scale = c.hbar * c.mu0 * omega.powi(3) / (16.0 * PI.powi(3) * c.c);
                let w_scale = c.hbar * c.mu0 * omega.powi(3) / (PI * c.c) / (16.0 * PI * PI);
                let lhs: Vec<Complex3Dyadic> = modes.iter().map(|m| m.scale_re(e_scale)).collect();
                let rhs: Vec<Complex3Dyadic> = rhs.iter().map(|m| m.scale_re(w_scale)).collect();
                *scaled = scaled.max(worst_residual(&lhs, &rhs));
            }
            Ok(())
        };
        if let Err(e) = run(&mut sweep, &mut scaled, &mut report) {
            report.fail(format!("omega={omega:e}: {e}"));
        }
    }
    report.param("scaled_residual", scaled).param("pairs", pairs.len());
    sweep.into_report(&mut report);
    report.finish_from_sweep()
}

/// `∫ d³s Σ_λ 𝒢_λ(r, s)·𝒢_λ†(r′, s) + ∫ do_n Σ_ν E(r) ⊗ E*(r′) = (ħμ₀ω²/π) Im 𝒢(r, r′)`,
/// swept over the volume quadrature with the mode term at its finest degree.
pub fn verify_commutator_kernel(config: &CheckConfig) -> IdentityReport {
    let tol = config.tolerance(Check::CommutatorKernel);
    let mut report = IdentityReport::new(Check::CommutatorKernel.name(), tol);
    if matches!(config.geometry, Geometry::Homogeneous { .. }) {
        report.fail("needs a vacuum exterior");
        return report.finish();
    }
    let mut sweep = SweepMax::default();
    let (mut dropped, mut vol_norm) = (0.0f64, 0.0f64);
    let mut lossy = false;
    for &omega in &config.omegas {
        let run = |sweep: &mut SweepMax, report: &mut IdentityReport| -> Result<(f64, f64, bool), String> {
            let g = green_at(config, omega)?;
            let c = &config.constants;
            let f2 = c.hbar * c.mu0 * omega * omega / PI;
            let e2 = c.hbar * c.mu0 * omega.powi(3) / (16.0 * PI.powi(3) * c.c);
            let points: Vec<Vec3> = config.pairs.iter().flat_map(|&(r, rp)| [r, rp]).collect();
            let factor = config.mode_degree_factors.iter().copied().fold(2.0, f64::max);
            let degree = (factor * truncation_order(&g, &points) as f64).ceil() as usize;
            report.param("mode_degree", degree);
            let modes: Vec<Complex3Dyadic> =
                mode_term(&g, &config.pairs, degree)?.into_iter().map(|m| m.scale_re(e2)).collect();
            let rhs: Vec<Complex3Dyadic> = im_green(&g, &config.pairs)?.into_iter().map(|m| m.scale_re(f2)).collect();
            let mut vnorm = 0.0;
            for (level, &q) in config.levels.iter().enumerate() {
                let volume: Vec<Complex3Dyadic> =
                    volume_term(&g, &config.pairs, q)?.into_iter().map(|v| v.scale_re(f2)).collect();
                vnorm = max_norm(&volume);
                let k: Vec<Complex3Dyadic> = volume.iter().zip(&modes).map(|(v, m)| *v + *m).collect();
                sweep.record(level, worst_residual(&k, &rhs));
            }
            let lossy = g.scatters() && vnorm > 0.0;
            Ok((worst_residual(&modes, &rhs), vnorm / max_norm(&rhs).max(f64::MIN_POSITIVE), lossy))
        };
        match run(&mut sweep, &mut report) {
            Ok((d, v, l)) => {
                dropped = dropped.max(d);
                vol_norm = vol_norm.max(v);
                lossy |= l;
            }
            Err(e) => report.fail(format!("omega={omega:e}: {e}")),
        }
    }
    report.param("volume_dropped_residual", dropped).param("relative_volume_norm", vol_norm);
    sweep.into_report(&mut report);
    let report = report.finish_from_sweep();
    if lossy && dropped <= 1e-2 {
        return report.reject(format!("dropping the volume term left residual {dropped:.3e}; expected > 1e-2"));
    }
    report
}
