use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use super::integral::{mode_term, surface_term};
use super::*;
use crate::dispersion::DispersionModel;
use crate::green::GreenFunction;
use crate::numerics::linalg::{dot3, relative_residual, Complex3Dyadic};

const C: f64 = 299_792_458.0;

fn sphere(eps: Complex64, mu: Complex64) -> Geometry {
    let material = Material::Lorentz(DispersionModel::matched(C, eps, mu).unwrap());
    Geometry::SphereInVacuum { radius: 1.0, material }
}

fn dielectric() -> Geometry {
    sphere(Complex64::new(2.0, 1.0), Complex64::new(1.0, 0.0))
}

fn magnetodielectric() -> Geometry {
    sphere(Complex64::new(2.0, 1.0), Complex64::new(1.5, 0.3))
}

fn single_pair(geometry: Geometry) -> CheckConfig {
    let mut c = CheckConfig::new(geometry, vec![C]);
    c.pairs.truncate(1);
    c
}

#[test]
fn registry_is_alphabetical_and_round_trips() {
    let names: Vec<&str> = Check::ALL.iter().map(|c| c.name()).collect();
    let mut sorted = names.clone();
    sorted.sort_unstable();
    assert_eq!(names, sorted);
    assert_eq!(names.len(), 11);
    for c in Check::ALL {
        assert_eq!(c.name().parse::<Check>().unwrap(), c);
    }
    assert_eq!("foo".parse::<Check>(), Err(ConfigError::UnknownCheck("foo".into())));
}

#[test]
fn config_rejects_points_near_the_surface() {
    let mut c = CheckConfig::new(dielectric(), vec![C]);
    assert!(c.validate().is_ok());
    c.pairs[0].0 = [0.0, 0.0, 1.02];
    assert!(matches!(c.validate(), Err(ConfigError::Invalid { field, .. }) if field == "pairs"));
    let mut c = CheckConfig::new(dielectric(), vec![C]);
    c.tolerances.insert("foo".into(), 1e-3);
    assert_eq!(c.validate(), Err(ConfigError::UnknownCheck("foo".into())));
    let report = Check::Reciprocity.run(&c);
    assert!(!report.converged && !report.errors.is_empty());
}

#[test]
fn vacuum_surface_relation_matches_closed_form() {
    let k = PhysicalConstants::si();
    for (s, tol) in [(PI / 2.0, 1e-12), (10.0, 1e-11), (0.5, 1e-10), (0.01, 1e-10)] {
        let r = [0.3, -0.2, 0.1];
        let rp = [r[0] - 0.6 * s, r[1], r[2] - 0.8 * s];
        let rep = verify_vacuum_closed_form(C, r, rp, &k, tol);
        assert!(rep.converged, "s={s}: {rep:?}");
    }
}

#[test]
fn reciprocity_in_every_scene() {
    let rep = verify_reciprocity(&CheckConfig::new(Geometry::Vacuum, vec![C]));
    assert!(rep.residual < 1e-14, "{rep:?}");
    let material = Material::Lorentz(DispersionModel::matched(C, Complex64::new(2.0, 1.0), Complex64::new(1.0, 0.0)).unwrap());
    let rep = verify_reciprocity(&CheckConfig::new(Geometry::Homogeneous { material }, vec![C]));
    assert!(rep.converged && rep.residual < 1e-13, "{rep:?}");
    let rep = verify_reciprocity(&CheckConfig::new(magnetodielectric(), vec![C]));
    assert!(rep.converged, "{rep:?}");
    assert!(rep.number("homogeneous_residual").unwrap() < 1e-13);
}

#[test]
fn fundamental_relation_vacuum_is_pure_surface() {
    let c = CheckConfig::new(Geometry::Vacuum, vec![C]);
    let rep = verify_fundamental_relation(&c);
    assert!(rep.converged && rep.residual < 1e-10, "{rep:?}");
    let rep = verify_fundamental_relation_without_volume(&c);
    assert!(rep.converged, "{rep:?}");
}

#[test]
fn fundamental_relation_dielectric_sphere() {
    let rep = verify_fundamental_relation(&single_pair(dielectric()));
    assert!(rep.converged && rep.residual < 1e-6, "{rep:?}");
    assert!(rep.number("volume_norm").unwrap() > 0.0);
}

#[test]
fn fundamental_relation_magnetodielectric_sphere() {
    let rep = verify_fundamental_relation(&single_pair(magnetodielectric()));
    assert!(rep.converged && rep.residual < 1e-5, "{rep:?}");
}

#[test]
fn dropping_the_volume_term_fails_for_an_absorbing_sphere() {
    let rep = verify_fundamental_relation_without_volume(&single_pair(dielectric()));
    assert!(!rep.converged);
    assert!(rep.residual >= 1e-2, "{rep:?}");
}

#[test]
fn mode_completeness_vacuum_and_sphere() {
    let rep = verify_mode_completeness(&CheckConfig::new(Geometry::Vacuum, vec![C]));
    assert!(rep.converged && rep.residual < 1e-10, "{rep:?}");
    let rep = verify_mode_completeness(&CheckConfig::new(magnetodielectric(), vec![C]));
    assert!(rep.converged && rep.residual < 1e-7, "{rep:?}");
    assert!(rep.number("scaled_residual").unwrap() < 1e-7);
}

#[test]
fn mode_gram_matrix_is_hermitian_positive() {
    let g = GreenFunction::new(&dielectric(), C).unwrap();
    let r = [1.2, 0.5, 0.9];
    let d = mode_term(&g, &[(r, r)], 24).unwrap()[0];
    assert!((d - d.adjoint()).max_abs() < 1e-13 * d.max_abs());
    // Positive semidefinite: every principal minor of a 3×3 Hermitian matrix is ≥ 0.
    let m = |i: usize, j: usize| d.0[i][j];
    for i in 0..3 {
        assert!(m(i, i).re >= 0.0);
        for j in i + 1..3 {
            assert!((m(i, i) * m(j, j) - m(i, j) * m(j, i)).re >= -1e-12 * d.max_abs().powi(2));
        }
    }
    let w = surface_term(&g, &[(r, r)], 24).unwrap()[0].scale_re(16.0 * PI * PI / g.k0());
    assert!(relative_residual(&d, &w) < 1e-7);
}

#[test]
fn commutator_kernel_balance() {
    let rep = verify_commutator_kernel(&single_pair(dielectric()));
    assert!(rep.converged && rep.residual < 1e-6, "{rep:?}");
    assert!(rep.number("volume_dropped_residual").unwrap() > 1e-2);
    let rep = verify_commutator_kernel(&CheckConfig::new(Geometry::Vacuum, vec![C]));
    assert!(rep.converged, "{rep:?}");
    assert_eq!(rep.number("relative_volume_norm"), Some(0.0));
}

#[test]
fn frequency_integrals_match_contour_results_with_static_pole() {
    let rep = verify_frequency_integrals(&CheckConfig::new(Geometry::Vacuum, vec![C]));
    assert!(rep.errors.is_empty(), "{rep:?}");
    assert!(rep.number("i3_residual").unwrap() < 1e-3, "{rep:?}");
    for k in 1..=4 {
        let v = rep.number(&format!("corrected_i{k}_residual")).unwrap();
        assert!(v < 1e-3, "I{k}: {v:e} {rep:?}");
    }
    assert!(rep.number("cutoff_sensitivity").unwrap() < 1e-6);
}

#[test]
fn jones_leading_term_is_exact_for_constants() {
    let f = |_: Vec3| Complex3Dyadic::identity();
    let n = [0.0, 0.6, 0.8];
    assert!(jones_remainder(&f, n, 50.0, 90).unwrap() < 1e-9);
}

#[test]
fn jones_remainder_without_endpoint_terms_is_first_order() {
    let n = [0.48, 0.6, -0.64];
    let f = |u: Vec3| Complex3Dyadic::identity().scale_re(1.0 - dot3(n, u).powi(2));
    let r1 = jones_remainder(&f, n, 50.0, 90).unwrap();
    let r2 = jones_remainder(&f, n, 100.0, 140).unwrap();
    // ξ ∫ e^{iξt}(1 − t²) 2π dt over t ∈ [−1, 1], with no endpoint terms.
    let exact = |x: f64| 2.0 * PI * (4.0 * x.sin() / (x * x) - 4.0 * x.cos() / x);
    assert!((r1 - exact(50.0).abs()).abs() < 1e-9 * r1, "{r1} {}", exact(50.0));
    assert!(r2 < r1);
}

#[test]
fn jones_remainder_of_farfield_decays_at_first_order() {
    let rep = verify_jones_lemma(&CheckConfig::new(Geometry::Vacuum, vec![C]));
    assert!(rep.errors.is_empty());
    let ratio = rep.number("ratio").unwrap();
    assert!((1.5..3.2).contains(&ratio), "{ratio}");
}

#[test]
fn transversality_and_mode_link_on_sphere() {
    let c = CheckConfig::new(magnetodielectric(), vec![C]);
    let rep = verify_transversality(&c);
    assert!(rep.converged, "{rep:?}");
    let rep = verify_mode_farfield_link(&c);
    assert!(rep.converged && rep.number("points").unwrap() >= 20.0, "{rep:?}");
    let rep = verify_transversality(&CheckConfig::new(Geometry::Vacuum, vec![C]));
    assert!(rep.residual < 1e-15, "{rep:?}");
}

#[test]
fn dispersion_checks_through_the_registry() {
    let c = CheckConfig::new(magnetodielectric(), vec![C]);
    let kk = Check::KramersKronig.run(&c);
    assert!(kk.converged, "{kk:?}");
    let ci = Check::CouplingIdentity.run(&c);
    assert!(ci.converged, "{ci:?}");
}

fn rotation(axis: Vec3, angle: f64) -> [[f64; 3]; 3] {
    let k = crate::numerics::linalg::normalize3(axis).unwrap();
    let (s, c) = angle.sin_cos();
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let cross = [[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]][i][j];
            m[i][j] = if i == j { c } else { 0.0 } + s * cross + (1.0 - c) * k[i] * k[j];
        }
    }
    m
}

fn rotate(m: &[[f64; 3]; 3], v: Vec3) -> Vec3 {
    [0, 1, 2].map(|i| m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn identities_are_rotation_invariant(
        ax in -1.0f64..1.0, ay in -1.0f64..1.0, az in 0.1f64..1.0, angle in 0.0f64..(2.0 * PI),
    ) {
        let m = rotation([ax, ay, az], angle);
        let base = CheckConfig::new(magnetodielectric(), vec![C]);
        let mut turned = base.clone();
        for p in &mut turned.pairs {
            *p = (rotate(&m, p.0), rotate(&m, p.1));
        }
        for p in &mut turned.interior_points {
            *p = rotate(&m, *p);
        }
        let a = verify_reciprocity(&base);
        let b = verify_reciprocity(&turned);
        prop_assert!((a.residual - b.residual).abs() < 1e-9);
        let k = PhysicalConstants::si();
        let (r, rp) = base.pairs[0];
        let a = verify_vacuum_closed_form(C, r, rp, &k, 1e-10);
        let b = verify_vacuum_closed_form(C, rotate(&m, r), rotate(&m, rp), &k, 1e-10);
        prop_assert!((a.residual - b.residual).abs() < 1e-9);

        // G(Rr, Rr′) = R G(r, r′) Rᵀ in every region pair.
        let g = GreenFunction::new(&base.geometry, C).unwrap();
        let rm = Complex3Dyadic::from_real(m);
        for (x, y) in [(r, rp), (base.interior_points[0], r), (base.interior_points[0], base.interior_points[1])] {
            let lhs = g.value(rotate(&m, x), rotate(&m, y)).unwrap();
            let rhs = rm.dot(&g.value(x, y).unwrap()).dot(&rm.transpose());
            prop_assert!(relative_residual(&lhs, &rhs) < 1e-9);
        }
    }
}
