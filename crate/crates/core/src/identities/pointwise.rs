//! Identities that hold point by point: no volume or frequency integration.

use super::{Check, CheckConfig, SweepMax};
use crate::green::{Geometry, GreenFunction};
use crate::modes::{mode_from_farfield, PlaneWaveLabel, ScatteringMode};
use crate::numerics::linalg::{norm3, normalize3, relative_residual, scale3, Complex3Vector, Vec3};
use crate::numerics::sphere_quadrature;
use crate::report::IdentityReport;

/// Incidence directions for mode checks; generic, plus one on the polar axis.
const INCIDENCE: [[f64; 3]; 3] = [[0.3, -0.5, 0.8], [-0.7, 0.2, -0.4], [0.0, 0.0, 1.0]];

fn incidence() -> impl Iterator<Item = Vec3> {
    INCIDENCE.into_iter().map(|n| normalize3(n).expect("nonzero direction"))
}

/// `𝒢(r, r′) − 𝒢ᵀ(r′, r)` in the configured scene and in the two closed-form
/// scenes built from the same material.
pub fn verify_reciprocity(config: &CheckConfig) -> IdentityReport {
    let tol = config.tolerance(Check::Reciprocity);
    let closed_tol = Check::Reciprocity.default_tolerance(&Geometry::Vacuum).min(tol);
    let mut report = IdentityReport::new(Check::Reciprocity.name(), tol);
    let material = config.material();
    let mut scenes = vec![("vacuum", Geometry::Vacuum)];
    if !material.is_vacuum() {
        scenes.push(("homogeneous", Geometry::Homogeneous { material: material.clone() }));
    }
    if matches!(config.geometry, Geometry::SphereInVacuum { .. }) {
        scenes.push(("sphere", config.geometry.clone()));
    }
    let mut pairs: Vec<(Vec3, Vec3)> = config.pairs.clone();
    let interior = &config.interior_points;
    for (i, &p) in interior.iter().enumerate() {
        for &q in &interior[i + 1..] {
            pairs.push((p, q));
        }
        for &(r, rp) in &config.pairs {
            pairs.push((p, r));
            pairs.push((rp, p));
        }
    }
    let mut worst: f64 = 0.0;
    let mut rejected = Vec::new();
    for (label, geometry) in &scenes {
        let mut scene_worst: f64 = 0.0;
        for &omega in &config.omegas {
            let g = match GreenFunction::with_constants(geometry, omega, config.constants) {
                Ok(g) => g,
                Err(e) => {
                    report.fail(format!("{label} at omega={omega:e}: {e}"));
                    continue;
                }
            };
            for (i, &(r, rp)) in pairs.iter().enumerate() {
                match (g.value(r, rp), g.value(rp, r)) {
                    (Ok(a), Ok(b)) => scene_worst = scene_worst.max(relative_residual(&a, &b.transpose())),
                    (Err(e), _) | (_, Err(e)) => report.fail(format!("{label} pair {i}: {e}")),
                }
            }
        }
        let limit = if *label == "sphere" { tol } else { closed_tol };
        if scene_worst > limit {
            rejected.push(format!("{label} residual {scene_worst:.3e} exceeds {limit:.1e}"));
        }
        report.param(&format!("{label}_residual"), scene_worst);
        worst = worst.max(scene_worst);
    }
    report.param("pairs", pairs.len());
    report.push_sweep(0, worst);
    rejected.into_iter().fold(report.finish_from_sweep(), IdentityReport::reject)
}

/// `u·𝒲(u, r′)` for every configured source point and `u·w⁽ˢᶜ⁾(u)` for a few
/// incidence directions, over a degree-16 direction grid.
pub fn verify_transversality(config: &CheckConfig) -> IdentityReport {
    let tol = config.tolerance(Check::Transversality);
    let mut report = IdentityReport::new(Check::Transversality.name(), tol);
    let rule = sphere_quadrature(16).expect("fixed degree");
    report.param("grid_degree", 16usize).param("grid_points", rule.len());
    let (mut w_worst, mut f_worst) = (0.0f64, 0.0f64);
    for &omega in &config.omegas {
        let g = match GreenFunction::with_constants(&config.geometry, omega, config.constants) {
            Ok(g) => g,
            Err(e) => {
                report.fail(e);
                continue;
            }
        };
        if matches!(config.geometry, Geometry::Homogeneous { .. }) {
            report.fail("a homogeneous medium has no far field");
            break;
        }
        for rp in config.all_points() {
            let (mut dot, mut size) = (0.0f64, 0.0f64);
            for o in &rule.nodes {
                match g.farfield(o, rp) {
                    Ok(w) => {
                        dot = dot.max(w.W.left_apply_real(o.unit_vector()).max_abs());
                        size = size.max(w.W.max_abs());
                    }
                    Err(e) => report.fail(e),
                }
            }
            w_worst = w_worst.max(if size > 0.0 { dot / size } else { dot });
        }
        for n in incidence() {
            for nu in [1, 2] {
                let mode = PlaneWaveLabel::new(omega, n, nu)
                    .map_err(|e| e.to_string())
                    .and_then(|l| ScatteringMode::with_green(g.clone(), l).map_err(|e| e.to_string()));
                let mode = match mode {
                    Ok(m) => m,
                    Err(e) => {
                        report.fail(e);
                        continue;
                    }
                };
                let (mut dot, mut size) = (0.0f64, 0.0f64);
                for o in &rule.nodes {
                    match mode.scattered_farfield(o) {
                        Ok(w) => {
                            dot = dot.max(w.dot_real(o.unit_vector()).norm());
                            size = size.max(w.max_abs());
                        }
                        Err(e) => report.fail(e),
                    }
                }
                // A vacuum sphere scatters nothing, which is trivially transverse.
                f_worst = f_worst.max(if size > 0.0 { dot / size } else { dot });
            }
        }
    }
    report.param("farfield_residual", w_worst).param("scattered_residual", f_worst);
    report.push_sweep(0, w_worst.max(f_worst));
    report.finish_from_sweep()
}

/// Points for the mode/far-field comparison: configured ones plus a fixed shell
/// grid spanning the interior and the near and intermediate exterior.
fn link_points(config: &CheckConfig, k0: f64) -> Vec<Vec3> {
    let mut pts = config.all_points();
    let dirs: [Vec3; 4] = [[0.48, 0.6, 0.64], [-0.6, 0.0, 0.8], [0.0, -1.0, 0.0], [0.36, 0.48, -0.8]];
    let shells: Vec<f64> = match config.geometry.radius() {
        Some(a) => vec![0.25 * a, 0.6 * a, 0.9 * a, 1.2 * a, 2.0 * a, 3.5 * a],
        None => [0.25, 0.6, 0.9, 1.2, 2.0, 3.5].iter().map(|s| s / k0).collect(),
    };
    for &s in &shells {
        pts.extend(dirs.iter().map(|&d| scale3(s / norm3(d), d)));
    }
    pts
}

/// `F⁽ˢ⁾(r)` from the Mie plane-wave series against `4π e·𝒲(o_{−n}, r)`.
pub fn verify_mode_farfield_link(config: &CheckConfig) -> IdentityReport {
    let tol = config.tolerance(Check::ModeFarfieldLink);
    let mut report = IdentityReport::new(Check::ModeFarfieldLink.name(), tol);
    let mut sweep = SweepMax::default();
    let mut count = 0usize;
    for &omega in &config.omegas {
        let g = match GreenFunction::with_constants(&config.geometry, omega, config.constants) {
            Ok(g) => g,
            Err(e) => {
                report.fail(e);
                continue;
            }
        };
        let points = link_points(config, g.k0());
        count = points.len();
        for n in incidence() {
            for nu in [1, 2] {
                let run = || -> Result<f64, String> {
                    let label = PlaneWaveLabel::new(omega, n, nu).map_err(|e| e.to_string())?;
                    let mode = ScatteringMode::with_green(g.clone(), label).map_err(|e| e.to_string())?;
                    let mut worst: f64 = 0.0;
                    for &r in &points {
                        let a = mode.eval(r).map_err(|e| format!("series at {r:?}: {e}"))?;
                        let b = mode_from_farfield(&g, &label, r).map_err(|e| format!("far field at {r:?}: {e}"))?;
                        worst = worst.max(vector_residual(&a, &b));
                    }
                    Ok(worst)
                };
                match run() {
                    Ok(w) => sweep.record(0, w),
                    Err(e) => report.fail(e),
                }
            }
        }
    }
    report.param("points", count).param("incidences", 2 * INCIDENCE.len());
    sweep.into_report(&mut report);
    report.finish_from_sweep()
}

fn vector_residual(a: &Complex3Vector, b: &Complex3Vector) -> f64 {
    let scale = a.max_abs().max(b.max_abs());
    let diff = (*a - *b).max_abs();
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}
