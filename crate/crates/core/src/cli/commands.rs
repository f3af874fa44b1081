use std::f64::consts::PI;
use std::sync::Arc;

use super::config::{Command, GridChoice, MetricKind, RunConfig};
use super::Report;
use crate::area_min::{
    minimize, seed_profile, threshold_scan_with, EquivariantAreaProblem, GridKind, MinimizeOptions, ScanSetup,
};
use crate::error::{Error, Result};
use crate::graph_operator::{
    barrier_check, threshold_kappa, triple_path_crosscheck, BarrierGrid, BarrierSpec, CrosscheckOptions,
};
use crate::radial_metric::{
    capped_cone_profile, condition_check, cone_conformal, cone_profile, curvature, curvature_decay_limit, log_grid,
    nonradial_ricci_constant, positive_curvature_profile, volume_growth_limit, warped_to_conformal,
    ConformalRadialProfile, NonexistenceVerdict, TableWarp, WarpedProfile,
};
use crate::stability::{
    locate_threshold, radial_eigenvalue, radial_eigenvalue_fd, rayleigh_min, stability_verdict, ConeStabilityProblem,
};

const CONE_BOUND_TOL: f64 = 1e-6;

pub(super) fn dispatch(cfg: &RunConfig) -> Result<Report> {
    match cfg.command {
        Command::MetricShow => metric_show(cfg),
        Command::MetricCheck => metric_check(cfg),
        Command::CurvatureSweep => curvature_sweep(cfg),
        Command::BarrierVerify => barrier_verify(cfg),
        Command::StabilityThreshold => stability_threshold(cfg),
        Command::Rayleigh => rayleigh(cfg),
        Command::Eigen => eigen(cfg),
        Command::AreaminSolve => areamin_solve(cfg),
        Command::AreaminScan => areamin_scan(cfg),
        Command::Kprime => kprime(cfg),
    }
}

fn e12(x: f64) -> String {
    format!("{x:.11e}")
}

fn row(values: &[f64]) -> String {
    let cells: Vec<String> = values.iter().map(|&v| e12(v)).collect();
    cells.join(" ") + "\n"
}

/// The cone parameter the metric is asymptotic to.
fn effective_kappa(cfg: &RunConfig) -> f64 {
    match cfg.kind {
        MetricKind::Flat => 1.0,
        MetricKind::Table => cfg.slope_hint.unwrap_or(cfg.kappa),
        _ => cfg.kappa,
    }
}

fn warped(cfg: &RunConfig) -> Result<WarpedProfile> {
    match cfg.kind {
        MetricKind::Cone => cone_profile(cfg.kappa, cfg.n),
        MetricKind::Flat => cone_profile(1.0, cfg.n),
        MetricKind::CappedCone => capped_cone_profile(cfg.kappa, cfg.n),
        MetricKind::Positive => positive_curvature_profile(cfg.kappa, cfg.n),
        MetricKind::Table => {
            let path = cfg
                .table
                .as_ref()
                .ok_or_else(|| Error::Unsupported("kind = table needs the `table` key".into()))?;
            let warp = TableWarp::from_file(path, cfg.slope_hint)?;
            WarpedProfile::new(cfg.n, Arc::new(warp))
        }
    }
}

fn conformal(cfg: &RunConfig) -> Result<ConformalRadialProfile> {
    match cfg.kind {
        MetricKind::Cone => cone_conformal(cfg.kappa, cfg.n),
        MetricKind::Flat => ConformalRadialProfile::flat(cfg.n),
        _ => warped_to_conformal(&warped(cfg)?),
    }
}

fn describe(report: &mut Report, cfg: &RunConfig) {
    report.line(format!(
        "metric {} n = {} (ambient {}) kappa = {}",
        cfg.kind.name(),
        cfg.n,
        cfg.n + 1,
        effective_kappa(cfg)
    ));
}

fn radii(cfg: &RunConfig) -> Vec<f64> {
    log_grid(cfg.r_min, cfg.r_max, cfg.samples)
}

fn metric_show(cfg: &RunConfig) -> Result<Report> {
    let mut report = Report::new();
    describe(&mut report, cfg);
    let profile = warped(cfg)?;
    report.line(format!("pole regular: {}", profile.pole_regular()));
    if let Some(s) = profile.asymptotic_slope() {
        report.line(format!("asymptotic slope: {s}"));
    }
    if let Some(t) = profile.linear_tail() {
        report.line(format!("linear tail from rho = {} with slope {}", t.start, t.slope));
    }
    let metric = conformal(cfg)?;
    report.line(format!(
        "conformal exponent {} regular at origin: {}",
        metric.kind(),
        metric.regular_at_origin()
    ));
    let mut table = String::from("r phi dphi rho\n");
    for r in radii(cfg) {
        let jet = metric.jet(r)?;
        let rho = match metric.warped_radius(r) {
            Some(v) => v?,
            None => f64::NAN,
        };
        table.push_str(&row(&[r, jet.value, jet.d1, rho]));
    }
    report.table("", table);
    Ok(report)
}

fn metric_check(cfg: &RunConfig) -> Result<Report> {
    let mut report = Report::new();
    describe(&mut report, cfg);
    let profile = warped(cfg)?;
    let grid = radii(cfg);
    let cond = condition_check(&profile, &grid)?;
    let mut table = String::from("check value pass\n");
    let mut record = |report: &mut Report, name: &str, value: f64, ok: bool| {
        table.push_str(&format!("{name} {} {}\n", e12(value), ok));
        report.check(ok, format!("{name} = {value:.6e}"));
    };
    record(&mut report, "C1_min_ricci", cond.min_ricci, cond.c1);
    record(&mut report, "C2_volume_constant", cond.c2, cond.c2 > 0.0);
    record(&mut report, "C3_curvature_scale", cond.c3, cond.c3.is_finite());
    match volume_growth_limit(&profile) {
        Ok(lim) => record(&mut report, "C2_limit", lim.value, lim.value > 0.0),
        Err(e) => report.line(format!("C2 limit not available: {e}")),
    }
    match curvature_decay_limit(&profile) {
        Ok(lim) => record(&mut report, "C3_limit", lim.value, lim.value.is_finite()),
        Err(e) => report.line(format!("C3 limit not available: {e}")),
    }
    let metric = conformal(cfg)?;
    match metric.check_bound(&grid, CONE_BOUND_TOL) {
        Ok(()) => record(&mut report, "conformal_bound", 0.0, true),
        Err(Error::ConformalBoundViolated { r, dphi, bound }) => {
            record(&mut report, "conformal_bound", dphi * r - bound * r, false);
            report.line(format!(
                "phi'(r) >= -2(1-kappa)/r fails at r = {r:.6e}: phi' = {dphi:.6e}, bound = {bound:.6e}"
            ));
        }
        Err(e) => return Err(e),
    }
    report.table("", table);
    Ok(report)
}

fn curvature_sweep(cfg: &RunConfig) -> Result<Report> {
    let mut report = Report::new();
    describe(&mut report, cfg);
    let profile = warped(cfg)?;
    let mut table = String::from("rho k_radial k_spherical ric_radial ric_spherical\n");
    let mut min_ricci = f64::INFINITY;
    for rho in radii(cfg) {
        let c = curvature(&profile, rho)?;
        min_ricci = min_ricci.min(c.ric_radial).min(c.ric_spherical);
        table.push_str(&row(&[rho, c.k_radial, c.k_spherical, c.ric_radial, c.ric_spherical]));
    }
    report.line(format!("min Ricci over the sweep: {min_ricci:.6e}"));
    report.table("", table);
    Ok(report)
}

fn barrier_verify(cfg: &RunConfig) -> Result<Report> {
    let mut report = Report::new();
    describe(&mut report, cfg);
    let kappa = effective_kappa(cfg);
    let spec = BarrierSpec::new(cfg.n, kappa, cfg.barrier_c)?;
    report.line(format!(
        "kappa* = {:.12}, barrier exponent p = {:.12}",
        threshold_kappa(cfg.n),
        spec.p
    ));
    let metric = conformal(cfg)?;
    let grid = BarrierGrid::new(cfg.theta_points, cfg.r_points, cfg.r_min, cfg.r_max)?;
    let res = barrier_check(&metric, &spec, &grid, cfg.alternate)?;
    report.line(res.summary());
    report.check(res.sign_ok, "theta*L(C theta r^p) >= 0 on the grid");
    report.check(res.bound_ok, "lower bound C e^{-phi} (p^2-1) theta^2 r^{p-2} holds");
    if let Some(alt) = &res.alternate {
        report.check(
            alt.sign_ok,
            "alternate barrier x_{n+1} w^{p-1} has the same sign pattern",
        );
    }
    report.table("", res.table());
    if cfg.fields > 0 {
        let opts = CrosscheckOptions {
            fields: cfg.fields,
            seed: cfg.seed,
            ..Default::default()
        };
        let cross = triple_path_crosscheck(&metric, opts)?;
        report.check(
            cross.passed(),
            format!(
                "operator forms agree on {} random fields (seed {}), worst gap/tolerance {:.3e}",
                cfg.fields, cfg.seed, cross.worst_ratio
            ),
        );
        report.table("crosscheck", cross.table());
    }
    Ok(report)
}

fn kappa_sweep(cfg: &RunConfig) -> Result<Vec<f64>> {
    let ks = threshold_kappa(cfg.n);
    let lo = cfg.kappa_min.unwrap_or((ks - 0.1).max(cfg.kappa_step));
    let hi = cfg.kappa_max.unwrap_or((ks + 0.1).min(1.0));
    if hi < lo {
        return Err(Error::param("kappa_max", hi, "below kappa_min"));
    }
    let count = ((hi - lo) / cfg.kappa_step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| lo + i as f64 * cfg.kappa_step).collect())
}

fn stability_threshold(cfg: &RunConfig) -> Result<Report> {
    let mut report = Report::new();
    let closed = threshold_kappa(cfg.n);
    let found = locate_threshold(cfg.n)?;
    report.line(format!(
        "n = {}: kappa* = {found:.12} (closed form 2 sqrt(n-1)/n = {closed:.12})",
        cfg.n
    ));
    report.check(
        (found - closed).abs() <= 1e-10,
        "bisection matches the closed form to 1e-10",
    );
    let mut table = String::from("kappa margin stable\n");
    for kappa in kappa_sweep(cfg)? {
        let v = stability_verdict(cfg.n, kappa)?;
        table.push_str(&format!("{} {} {}\n", e12(kappa), e12(v.margin), v.stable));
    }
    report.table("", table);
    Ok(report)
}

fn rayleigh(cfg: &RunConfig) -> Result<Report> {
    let mut report = Report::new();
    let problem = ConeStabilityProblem::new(cfg.n, cfg.kappa, cfg.b2, cfg.epsilon)?;
    let gap = (PI / cfg.epsilon.ln()).powi(2);
    let exact = problem.margin() + gap;
    report.line(format!(
        "n = {} kappa = {} |B|^2 = {} epsilon = {}: margin {:.9e}, first eigenvalue margin + (pi/log eps)^2 = {exact:.9e}",
        cfg.n,
        cfg.kappa,
        cfg.b2,
        cfg.epsilon,
        problem.margin()
    ));
    let mut table = String::from("basis lambda1 exact\n");
    let half = cfg.basis / 2;
    if half < 8 {
        return Err(Error::param(
            "basis",
            cfg.basis as f64,
            "rayleigh needs at least 16 to extrapolate",
        ));
    }
    let coarse = rayleigh_min(&problem, half)?;
    let fine = rayleigh_min(&problem, cfg.basis)?;
    table.push_str(&format!("{half} {} {}\n", e12(coarse), e12(exact)));
    table.push_str(&format!("{} {} {}\n", cfg.basis, e12(fine), e12(exact)));
    // hat functions converge at second order in the mesh width
    let q = ((cfg.basis + 1) as f64 / (half + 1) as f64).powi(2);
    let extrapolated = (q * fine - coarse) / (q - 1.0);
    report.line(format!(
        "Ritz minimum with {} hat functions: {fine:.9e}; extrapolated {extrapolated:.9e}",
        cfg.basis
    ));
    let tol = 1e-4 * exact.abs().max(1.0);
    report.check(
        (extrapolated - exact).abs() <= tol,
        format!("extrapolated Ritz value within {tol:.1e} of the closed form"),
    );
    report.check(
        (fine >= 0.0) == (exact >= 0.0),
        format!(
            "sign of the first eigenvalue: {}",
            if exact >= 0.0 { "stable" } else { "unstable" }
        ),
    );
    report.table("", table);
    Ok(report)
}

fn eigen(cfg: &RunConfig) -> Result<Report> {
    let mut report = Report::new();
    report.line(format!(
        "n = {} epsilon = {} with {} grid points",
        cfg.n, cfg.epsilon, cfg.grid_points
    ));
    let coarse = (cfg.grid_points / 2).max(64);
    let mut table = String::from("k exact fd rel_error order\n");
    for k in 1..=cfg.k {
        let (exact, _) = radial_eigenvalue(cfg.n, cfg.epsilon, k)?;
        let fine = radial_eigenvalue_fd(cfg.n, cfg.epsilon, k, cfg.grid_points)?;
        let rough = radial_eigenvalue_fd(cfg.n, cfg.epsilon, k, coarse)?;
        let rel = ((fine - exact) / exact).abs();
        let h_ratio = (cfg.grid_points - 1) as f64 / (coarse - 1) as f64;
        let order = ((rough - exact) / (fine - exact)).abs().ln() / h_ratio.ln();
        table.push_str(&format!(
            "{k} {} {} {} {}\n",
            e12(exact),
            e12(fine),
            e12(rel),
            e12(order)
        ));
        report.check(
            rel < 1e-3,
            format!("k = {k}: relative error {rel:.3e} < 1e-3, observed order {order:.3}"),
        );
    }
    report.table("", table);
    Ok(report)
}

fn grid_kind(cfg: &RunConfig) -> GridKind {
    match cfg.grid {
        GridChoice::Geometric => GridKind::Geometric {
            axis_ratio: cfg.axis_ratio,
        },
        GridChoice::Uniform => GridKind::Uniform,
    }
}

fn minimize_options(cfg: &RunConfig) -> MinimizeOptions {
    MinimizeOptions {
        max_iter: cfg.max_iter,
        grad_tol: cfg.grad_tol,
        verdict_tol: cfg.verdict_tol,
        ..Default::default()
    }
}

fn areamin_solve(cfg: &RunConfig) -> Result<Report> {
    let mut report = Report::new();
    describe(&mut report, cfg);
    let problem = EquivariantAreaProblem::new(conformal(cfg)?, cfg.w_outer, cfg.grid_size, grid_kind(cfg))?;
    let seed = seed_profile(&problem, cfg.amplitude * cfg.w_outer);
    let res = minimize(&problem, &seed, minimize_options(cfg))?;
    report.line(format!(
        "area_flat = {:.12e} area_min = {:.12e} gap = {:.6e}",
        res.area_flat,
        res.area_min,
        res.gap()
    ));
    report.line(format!(
        "converged: {} after {} iterations; sup|u*| = {:.3e}",
        res.converged,
        res.iterations,
        res.sup_norm()
    ));
    report.line(format!("verdict: {} ({})", res.verdict.short(), res.verdict.label()));
    let mut table = String::from("w u\n");
    for (w, u) in problem.grid().iter().zip(&res.u_star) {
        table.push_str(&row(&[*w, *u]));
    }
    report.table("", table);
    let mut trace = String::from("iteration area grad_sup step\n");
    for t in &res.trace {
        trace.push_str(&format!(
            "{} {} {} {}\n",
            t.iteration,
            e12(t.area),
            e12(t.grad_sup),
            e12(t.step)
        ));
    }
    report.table("trace", trace);
    Ok(report)
}

fn areamin_scan(cfg: &RunConfig) -> Result<Report> {
    let mut report = Report::new();
    let n = cfg.n;
    let kappas = kappa_sweep(cfg)?;
    let setup = ScanSetup {
        w_outer: cfg.w_outer,
        grid_size: cfg.grid_size,
        kind: grid_kind(cfg),
        amplitude: cfg.amplitude,
    };
    let opts = minimize_options(cfg);
    let table = match cfg.kind {
        MetricKind::Cone => threshold_scan_with(n, &kappas, |k| cone_conformal(k, n), setup, opts)?,
        MetricKind::CappedCone => threshold_scan_with(
            n,
            &kappas,
            |k| warped_to_conformal(&capped_cone_profile(k, n)?),
            setup,
            opts,
        )?,
        MetricKind::Positive => threshold_scan_with(
            n,
            &kappas,
            |k| warped_to_conformal(&positive_curvature_profile(k, n)?),
            setup,
            opts,
        )?,
        other => {
            return Err(Error::Unsupported(format!(
                "areamin-scan needs a one-parameter family; kind `{}` has none",
                other.name()
            )))
        }
    };
    let ks = threshold_kappa(n);
    report.line(format!(
        "{} scan, n = {n}, {} values of kappa in [{:.4}, {:.4}], kappa* = {ks:.6}",
        cfg.kind.name(),
        kappas.len(),
        kappas[0],
        kappas[kappas.len() - 1]
    ));
    report.check(!table.non_monotone, "verdicts split at most once along kappa");
    match table.transition {
        Some(t) => {
            report.line(format!(
                "empirical transition kappa = {t:.4} (kappa* - transition = {:.4})",
                ks - t
            ));
            if cfg.kind == MetricKind::Cone {
                let band = cfg.kappa_step + 0.03;
                report.check((t - ks).abs() <= band, format!("transition within {band:.3} of kappa*"));
            }
        }
        None => report.line("no transition inside the kappa range"),
    }
    report.table("", table.table());
    Ok(report)
}

fn kprime(cfg: &RunConfig) -> Result<Report> {
    let mut report = Report::new();
    describe(&mut report, cfg);
    let profile = warped(cfg)?;
    let est = nonradial_ricci_constant(&profile)?;
    let verdict = NonexistenceVerdict::from_estimate(&est, cfg.n);
    let hardy = (cfg.n as f64 - 2.0).powi(2) / 4.0;
    report.line(format!(
        "kappa' = {:.10} +/- {:.2e}; (n-2)^2/4 = {hardy:.10}",
        est.value, est.uncertainty
    ));
    report.line(format!("verdict: {}", verdict.label()));
    if matches!(cfg.kind, MetricKind::Cone | MetricKind::CappedCone) {
        let closed = (cfg.n as f64 - 1.0) * (1.0 / (cfg.kappa * cfg.kappa) - 1.0);
        let rel = ((est.value - closed) / closed.abs().max(1e-300)).abs();
        let ok = if closed == 0.0 {
            est.value.abs() < 1e-8
        } else {
            rel < 1e-4
        };
        report.check(ok, format!("matches (n-1)(1/kappa^2 - 1) = {closed:.10}"));
    }
    let mut table = String::from("rho value\n");
    for (rho, v) in &est.samples {
        table.push_str(&row(&[*rho, *v]));
    }
    report.table("", table);
    Ok(report)
}
