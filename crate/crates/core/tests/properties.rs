use std::f64::consts::PI;

use proptest::prelude::*;

use conelab::area_min::{
    area_of_graph, second_variation_fd, threshold_scan, EquivariantAreaProblem, GridKind, MinimizeOptions, Verdict,
};
use conelab::graph_operator::{
    barrier_exponent, graph_factor, l_conformal, l_polar, mean_curvature_graph, threshold_kappa,
    triple_path_crosscheck, BarrierField, CrosscheckOptions, QuadraticField,
};
use conelab::radial_metric::{
    capped_cone_profile, cone_conformal, cone_profile, curvature, nonexistence_verdict, positive_curvature_profile,
    warped_to_conformal, NonexistenceVerdict, WarpedProfile,
};
use conelab::stability::{
    index_form, radial_eigenvalue, radial_eigenvalue_fd, rayleigh_min, stability_margin, stability_verdict,
    weighted_norm_sq, ConeStabilityProblem, RadialTestFunction,
};
use nalgebra::{DMatrix, DVector};

fn profile(kind: u8, kappa: f64, n: usize) -> WarpedProfile {
    match kind {
        0 => cone_profile(kappa, n),
        1 => capped_cone_profile(kappa, n),
        _ => positive_curvature_profile(kappa, n),
    }
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn curvature_report_is_self_consistent(kind in 0u8..3, kappa in 0.3f64..0.99, n in 3usize..9, rho in 0.05f64..50.0) {
        let c = curvature(&profile(kind, kappa, n), rho).unwrap();
        let nf = n as f64;
        prop_assert_eq!(c.ric_radial, nf * c.k_radial);
        prop_assert_eq!(c.ric_spherical, (nf - 1.0) * c.k_spherical + c.k_radial);
    }

    #[test]
    fn capped_cone_radial_curvature_matches_differences(kappa in 0.3f64..0.95, frac in 0.2f64..0.9) {
        let p = capped_cone_profile(kappa, 4).unwrap();
        let rho0 = p.linear_tail().unwrap().start;
        let rho = frac * rho0;
        let exact = curvature(&p, rho).unwrap().k_radial;
        let err = |h: f64| {
            let l = |x: f64| p.lambda(x).unwrap();
            let d2 = (l(rho + h) - 2.0 * l(rho) + l(rho - h)) / (h * h);
            (-d2 / l(rho) - exact).abs()
        };
        let (e1, e2) = (err(4e-3), err(2e-3));
        // second order, or already at the noise floor of the inversion
        prop_assert!(e2 < 1e-5 || e1 / e2 > 3.0, "errors {e1:e} {e2:e}");
    }

    #[test]
    fn converted_cone_keeps_its_exponent(kappa in 0.3f64..1.0, n in 3usize..9) {
        let direct = cone_conformal(kappa, n).unwrap();
        let converted = warped_to_conformal(&cone_profile(kappa, n).unwrap()).unwrap();
        for i in 0..=40 {
            let r = 10f64.powf(-2.0 + i as f64 / 10.0);
            let gap = (direct.dphi(r).unwrap() - converted.dphi(r).unwrap()) * r;
            prop_assert!(gap.abs() < 1e-6, "r = {r}: {gap:e}");
        }
    }

    #[test]
    fn nonexistence_verdict_tracks_the_threshold(n in 3usize..11, i in 1usize..1000) {
        let kappa = i as f64 * 1e-3;
        let kp = (n as f64 - 1.0) * (1.0 / (kappa * kappa) - 1.0);
        let hardy = (n as f64 - 2.0).powi(2) / 4.0;
        let expect = kp - hardy > 0.0;
        prop_assert_eq!(nonexistence_verdict(kp, n) == NonexistenceVerdict::NoStableHypersurface, expect);
    }

    #[test]
    fn operator_forms_agree_on_random_fields(seed in 0u64..1_000_000, kappa in 0.4f64..1.0, n in 3usize..8, capped in any::<bool>()) {
        let metric = if capped && kappa < 0.99 {
            warped_to_conformal(&capped_cone_profile(kappa, n).unwrap()).unwrap()
        } else {
            cone_conformal(kappa, n).unwrap()
        };
        let report = triple_path_crosscheck(&metric, CrosscheckOptions { fields: 3, seed, ..Default::default() }).unwrap();
        prop_assert!(report.passed(), "worst ratio {}", report.worst_ratio);
    }

    #[test]
    fn operator_is_scaled_mean_curvature(
        kappa in 0.4f64..1.0,
        coeffs in prop::collection::vec(-1.0f64..1.0, 25),
        point in prop::collection::vec(-1.0f64..1.0, 4),
    ) {
        let n = 3;
        let metric = cone_conformal(kappa, n).unwrap();
        let d = n + 1;
        let field = QuadraticField {
            c: coeffs[0],
            b: DVector::from_column_slice(&coeffs[1..1 + d]),
            a: DMatrix::from_column_slice(d, d, &coeffs[1 + d..1 + d + d * d]),
        };
        let x: Vec<f64> = point.iter().map(|v| v + 0.05_f64.copysign(*v)).collect();
        let l = l_conformal(&metric, &field, &x).unwrap();
        let h = mean_curvature_graph(&metric, &field, &x).unwrap();
        let g = graph_factor(&metric, &field, &x).unwrap();
        prop_assert!((l - g * h).abs() < 1e-8 * (1.0 + l.abs()), "{l} vs {}", g * h);
    }

    #[test]
    fn barrier_exponent_identity(n in 3usize..13, frac in 0.0f64..=1.0) {
        let ks = threshold_kappa(n);
        let kappa = ks + (1.0 - ks) * frac;
        let p = barrier_exponent(n, kappa).unwrap();
        let nf = n as f64;
        prop_assert!((nf * (kappa * p - 1.0) + 1.0 - p * p).abs() < 1e-12);
        prop_assert!(p * p + (nf - 1.0) * kappa * p - nf >= p * p - 1.0 - 1e-12);
        prop_assert!(p * p - 1.0 >= -1e-12);
    }

    #[test]
    fn barrier_is_odd_in_theta(kind in 0u8..2, kappa in 0.7f64..0.99, n in 3usize..9, theta in 0.0f64..=1.0, lr in -2.0f64..2.0) {
        let metric = warped_to_conformal(&profile(kind, kappa, n)).unwrap();
        let field = BarrierField { c: 1.0, p: barrier_exponent(n, kappa.max(threshold_kappa(n))).unwrap() };
        let r = 10f64.powf(lr);
        let plus = l_polar(&metric, &field, theta, r).unwrap();
        let minus = l_polar(&metric, &field, -theta, r).unwrap();
        prop_assert_eq!(plus, -minus);
    }

    #[test]
    fn index_form_matches_eigenvalue_identity(n in 3usize..9, kappa in 0.3f64..=1.0, k in 1usize..4, le in 1.0f64..5.0) {
        let eps = 10f64.powf(-le);
        let p = ConeStabilityProblem::new(n, kappa, 0.0, eps).unwrap();
        let (lam, f) = radial_eigenvalue(n, eps, k).unwrap();
        let want = (p.potential() + lam) * weighted_norm_sq(&p, &f);
        let got = index_form(&p, &f).unwrap();
        prop_assert!((got - want).abs() <= 1e-6 * want.abs().max(weighted_norm_sq(&p, &f)), "{got} vs {want}");
    }

    #[test]
    fn verdict_flips_at_the_threshold(n in 3usize..11, kappa in 0.05f64..=1.0) {
        let v = stability_verdict(n, kappa).unwrap();
        prop_assert_eq!(v.stable, kappa >= threshold_kappa(n) - 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn radial_fd_converges_at_second_order(n in 3usize..9, k in 1usize..4, le in 1.5f64..4.0) {
        let eps = 10f64.powf(-le);
        let (exact, _) = radial_eigenvalue(n, eps, k).unwrap();
        let e1 = radial_eigenvalue_fd(n, eps, k, 800).unwrap() - exact;
        let e2 = radial_eigenvalue_fd(n, eps, k, 1600).unwrap() - exact;
        let order = (e1 / e2).abs().ln() / (1599.0f64 / 799.0).ln();
        prop_assert!((1.8..=2.2).contains(&order), "order {order}");
    }

    #[test]
    fn rayleigh_sign_matches_the_verdict(n in 4usize..11, kappa in 0.3f64..=1.0) {
        prop_assume!((kappa - threshold_kappa(n)).abs() > 0.02);
        let p = ConeStabilityProblem::new(n, kappa, 0.0, 1e-4).unwrap();
        let ritz = rayleigh_min(&p, 200).unwrap();
        prop_assert_eq!(ritz >= 0.0, stability_verdict(n, kappa).unwrap().stable, "ritz {}", ritz);
    }

    #[test]
    fn area_gradient_matches_differences(n in 3usize..8, kappa in 0.5f64..=1.0, amp in -0.3f64..0.3, j in 1usize..4) {
        let problem = EquivariantAreaProblem::new(cone_conformal(kappa, n).unwrap(), 1.0, 64, GridKind::Uniform).unwrap();
        let u: Vec<f64> = problem.grid().iter().map(|&w| amp * (j as f64 * PI * w).sin()).collect();
        let g = problem.gradient(&u).unwrap();
        for i in [5usize, 20, 40, 62] {
            let h = 1e-6;
            let mut up = u.clone();
            up[i] += h;
            let mut dn = u.clone();
            dn[i] -= h;
            let fd = (problem.area(&up).unwrap() - problem.area(&dn).unwrap()) / (2.0 * h);
            prop_assert!((fd - g[i]).abs() < 1e-6 * (1.0 + g[i].abs()), "node {i}: {fd} vs {}", g[i]);
        }
    }

    #[test]
    fn flat_is_no_worse_than_competitors_above_threshold(
        n in 3usize..9,
        frac in 0.0f64..=1.0,
        amps in prop::collection::vec(-0.5f64..0.5, 3),
    ) {
        let ks = threshold_kappa(n);
        let kappa = ks + (1.0 - ks) * frac;
        let problem = EquivariantAreaProblem::new(cone_conformal(kappa, n).unwrap(), 1.0, 256, GridKind::DEFAULT).unwrap();
        let flat = area_of_graph(&problem, &problem.zero()).unwrap();
        let mut u: Vec<f64> = problem
            .grid()
            .iter()
            .map(|&w| {
                amps.iter()
                    .enumerate()
                    .map(|(j, a)| a * ((j + 1) as f64 * PI * w).sin() + a * w.powf(0.5) * (1.0 - w))
                    .sum()
            })
            .collect();
        problem.project(&mut u);
        let area = area_of_graph(&problem, &u).unwrap();
        prop_assert!(area >= flat * (1.0 - 1e-12), "{area} < {flat}");
    }
}

/// Area-side test mode `φ(w) = f(w^κ) w^{1−κ}/κ` with `sup|φ/w| = 1`,
/// supported on `(ε_w, 1)`.
fn area_mode(problem: &EquivariantAreaProblem, n: usize, kappa: f64, eps_w: f64) -> Vec<f64> {
    let (_, f) = radial_eigenvalue(n, eps_w.powf(kappa), 1).unwrap();
    let mut phi: Vec<f64> = problem
        .grid()
        .iter()
        .map(|&w| {
            if w <= eps_w || w >= 1.0 {
                0.0
            } else {
                f.value(w.powf(kappa)) * w.powf(1.0 - kappa) / kappa
            }
        })
        .collect();
    let sup = problem
        .grid()
        .iter()
        .zip(&phi)
        .skip(1)
        .map(|(w, v)| (v / w).abs())
        .fold(0.0, f64::max);
    phi.iter_mut().for_each(|v| *v /= sup);
    phi
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn second_variation_has_the_sign_of_the_margin(n in 3usize..9, offset in prop::sample::select(vec![-0.1, -0.05, 0.05, 0.1])) {
        let kappa = (threshold_kappa(n) + offset).min(1.0);
        let margin = stability_margin(n, kappa, 0.0);
        // long enough in log w for the first mode to go negative when unstable
        let eps_w = (-PI / (kappa * (margin.abs() / 2.0).sqrt())).exp().max(1e-6);
        let problem = EquivariantAreaProblem::new(cone_conformal(kappa, n).unwrap(), 1.0, 1024, GridKind::DEFAULT).unwrap();
        let phi = area_mode(&problem, n, kappa, eps_w);
        let q = second_variation_fd(&problem, &phi, 0.1).unwrap();
        prop_assert_eq!(q > 0.0, margin > 0.0, "n = {}, kappa = {}, q = {:e}, margin = {}", n, kappa, q, margin);
    }
}

#[test]
fn rayleigh_gap_shrinks_like_inverse_log_squared() {
    for (n, kappa) in [(7usize, 0.9), (7, 0.6), (5, 0.95), (10, 0.5)] {
        let margin = stability_margin(n, kappa, 0.0);
        let mut signs = Vec::new();
        for eps in [1e-3, 1e-4, 1e-5] {
            let p = ConeStabilityProblem::new(n, kappa, 0.0, eps).unwrap();
            let (coarse, fine) = (rayleigh_min(&p, 200).unwrap(), rayleigh_min(&p, 400).unwrap());
            // hat functions converge at second order in the mesh width
            let q = (401.0f64 / 201.0).powi(2);
            let ritz = (q * fine - coarse) / (q - 1.0);
            let gap = ritz - margin;
            let predicted = (PI / f64::ln(eps)).powi(2);
            assert!(
                (gap / predicted - 1.0).abs() < 1e-3,
                "n {n} kappa {kappa} eps {eps}: gap {gap} vs {predicted}"
            );
            signs.push(ritz >= 0.0);
            assert_eq!(stability_verdict(n, kappa).unwrap().margin, margin);
        }
        assert!(signs.iter().all(|&s| s == signs[0]), "n {n} kappa {kappa}: {signs:?}");
    }
}

#[test]
fn rayleigh_at_three_dimensions_sees_the_dirichlet_gap() {
    // the margin just below threshold is smaller than (π/log ε)², so the
    // truncated problem stays positive even though the cone is unstable
    let n = 3;
    let kappa = threshold_kappa(n) - 0.02;
    let margin = stability_margin(n, kappa, 0.0);
    let gap = (PI / f64::ln(1e-4)).powi(2);
    assert!(margin < 0.0 && margin + gap > 0.0);
    let ritz = rayleigh_min(&ConeStabilityProblem::new(n, kappa, 0.0, 1e-4).unwrap(), 200).unwrap();
    assert!(ritz > 0.0);
}

#[test]
fn verdicts_survive_grid_doubling() {
    for (n, kappas) in [(4usize, [0.80, 0.83, 0.90, 0.95]), (7, [0.62, 0.66, 0.74, 0.80])] {
        let coarse = threshold_scan(n, &kappas, 1.0, 256, GridKind::DEFAULT, MinimizeOptions::default()).unwrap();
        let fine = threshold_scan(n, &kappas, 1.0, 512, GridKind::DEFAULT, MinimizeOptions::default()).unwrap();
        for (a, b) in coarse.rows.iter().zip(&fine.rows) {
            assert_eq!(a.verdict, b.verdict, "n = {n}, kappa = {}", a.kappa);
            let expect = if a.kappa > threshold_kappa(n) {
                Verdict::FlatIsMin
            } else {
                Verdict::CompetitorBeatsFlat
            };
            assert_eq!(a.verdict, expect, "n = {n}, kappa = {}", a.kappa);
        }
    }
}

#[test]
fn first_order_test_functions_use_the_integrated_form() {
    struct Tent;
    impl RadialTestFunction for Tent {
        fn value(&self, rho: f64) -> f64 {
            (rho.ln() / f64::ln(1e-2) * PI).sin()
        }
        fn derivative(&self, rho: f64) -> f64 {
            let a = PI / f64::ln(1e-2);
            (rho.ln() * a).cos() * a / rho
        }
    }
    let p = ConeStabilityProblem::new(7, 0.9, 0.0, 1e-2).unwrap();
    assert!(index_form(&p, &Tent).unwrap().is_finite());
}
