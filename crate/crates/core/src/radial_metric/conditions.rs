//! Asymptotic conditions on a profile: non-negative Ricci curvature, Euclidean
//! volume growth, quadratic curvature decay, and the non-radial Ricci
//! constant `κ′`.

use std::cell::RefCell;

use super::{curvature, WarpedProfile};
use crate::error::{Error, Result};
use crate::numeric::quad::{integrate, QuadOptions};
use crate::numeric::richardson::{limit_at_infinity, LadderOptions, LimitEstimate};
use crate::numeric::unit_sphere_measure;

/// `m` points spaced geometrically on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    if m <= 1 {
        return vec![lo];
    }
    let ratio = (hi / lo).ln();
    (0..m)
        .map(|i| {
            if i + 1 == m {
                hi
            } else {
                lo * (ratio * i as f64 / (m - 1) as f64).exp()
            }
        })
        .collect()
}

fn quad_opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-10,
        rel_tol: 1e-12,
        max_panels: 1 << 16,
    }
}

/// `∫₀^r λ(ρ)ⁿ dρ`.
fn lambda_power_integral(profile: &WarpedProfile, r: f64) -> Result<f64> {
    let n = profile.n() as i32;
    let tail = profile.linear_tail();
    let tail_part = |start: f64, v: f64, s: f64| {
        let end = v + s * (r - start);
        (end.powi(n + 1) - v.powi(n + 1)) / (s * (n + 1) as f64)
    };
    if let Some(t) = tail {
        if r >= t.start && t.start == 0.0 {
            return Ok(tail_part(0.0, t.value_at_start, t.slope));
        }
    }
    if let Some(g) = profile.warp().radial_graph() {
        // with λ as the variable: dρ = √(1+g²) dλ
        let (t_stop, tail_value) = match tail {
            Some(t) if r >= t.start => (g.t_end(), tail_part(t.start, t.value_at_start, t.slope)),
            _ => (g.param_at(r)?, 0.0),
        };
        let shape = g.shape();
        let inner = integrate(
            |t| t.powi(n) * (1.0 + shape.slope(t).powi(2)).sqrt(),
            0.0,
            t_stop,
            quad_opts(),
        )?;
        return Ok(inner.value + tail_value);
    }
    let lo = profile.domain_min();
    if lo > 0.0 {
        return Err(Error::Unsupported(format!(
            "volume from the pole needs the profile down to rho = 0, table starts at {lo}"
        )));
    }
    let err = RefCell::new(None);
    let v = integrate(
        |rho| match profile.lambda(rho) {
            Ok(l) => l.powi(n),
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        lo,
        r,
        quad_opts(),
    );
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    Ok(v?.value)
}

/// `Vol(B_r)/r^{n+1}` with `Vol(B_r) = ω_n ∫₀^r λⁿ`.
pub fn volume_growth(profile: &WarpedProfile, r_max: f64) -> Result<f64> {
    if !(r_max > profile.domain_min()) {
        return Err(Error::param("r_max", r_max, "must exceed the profile's domain minimum"));
    }
    let n = profile.n();
    let vol = unit_sphere_measure(n) * lambda_power_integral(profile, r_max)?;
    Ok(vol / r_max.powi(n as i32 + 1))
}

/// `lim_{r→∞} Vol(B_r)/r^{n+1}` by extrapolation along `r = 2^k`.
pub fn volume_growth_limit(profile: &WarpedProfile) -> Result<LimitEstimate> {
    limit_at_infinity(|r| volume_growth(profile, r), ladder())
}

fn ladder() -> LadderOptions {
    LadderOptions::default()
}

fn curvature_scale(profile: &WarpedProfile, rho: f64) -> Result<f64> {
    let c = curvature(profile, rho)?;
    Ok(rho * rho * c.k_radial.abs().max(c.k_spherical.abs()))
}

/// `lim ρ² max(|K_rad|, |K_sph|)`.
pub fn curvature_decay_limit(profile: &WarpedProfile) -> Result<LimitEstimate> {
    limit_at_infinity(|r| curvature_scale(profile, r), ladder())
}

/// `κ′ = lim ρ² Ric(e_α, e_α)` for unit `e_α` tangent to the spheres.
pub fn nonradial_ricci_constant(profile: &WarpedProfile) -> Result<LimitEstimate> {
    if profile.asymptotic_slope().is_none() {
        return Err(Error::Unsupported(format!(
            "profile kind `{}` is not declared asymptotically conical",
            profile.kind()
        )));
    }
    limit_at_infinity(|rho| Ok(rho * rho * curvature(profile, rho)?.ric_spherical), ladder())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonexistenceVerdict {
    NoStableHypersurface,
    Inconclusive,
}

impl NonexistenceVerdict {
    pub fn label(self) -> &'static str {
        match self {
            Self::NoStableHypersurface => "NoStableHypersurface",
            Self::Inconclusive => "Inconclusive",
        }
    }

    /// Verdict from an extrapolated `κ′`: requires the whole uncertainty
    /// interval to clear the bound.
    pub fn from_estimate(kappa_prime: &LimitEstimate, n: usize) -> Self {
        nonexistence_verdict(kappa_prime.value - kappa_prime.uncertainty, n)
    }
}

/// `NoStableHypersurface` iff `κ′ > (n−2)²/4`; the criterion is one-sided.
pub fn nonexistence_verdict(kappa_prime: f64, n: usize) -> NonexistenceVerdict {
    let hardy = (n as f64 - 2.0).powi(2) / 4.0;
    if kappa_prime > hardy {
        NonexistenceVerdict::NoStableHypersurface
    } else {
        NonexistenceVerdict::Inconclusive
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionReport {
    /// Both Ricci entries are `≥ −tol` on the grid.
    pub c1: bool,
    pub min_ricci: f64,
    /// Volume growth constant at the largest grid radius.
    pub c2: f64,
    /// `max ρ² max(|K_rad|, |K_sph|)` over the grid.
    pub c3: f64,
}

impl ConditionReport {
    pub fn passes(&self) -> bool {
        self.c1 && self.c2 > 0.0 && self.c3.is_finite()
    }
}

/// Absolute tolerance for the sign of Ricci curvature in [`condition_check`].
pub const RICCI_TOL: f64 = 1e-9;

pub fn condition_check(profile: &WarpedProfile, grid: &[f64]) -> Result<ConditionReport> {
    let r_max = grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if grid.is_empty() {
        return Err(Error::param("grid", 0.0, "needs at least one radius"));
    }
    let mut min_ricci = f64::INFINITY;
    let mut c3: f64 = 0.0;
    for &rho in grid {
        let c = curvature(profile, rho)?;
        min_ricci = min_ricci.min(c.ric_radial).min(c.ric_spherical);
        c3 = c3.max(rho * rho * c.k_radial.abs().max(c.k_spherical.abs()));
    }
    Ok(ConditionReport {
        c1: min_ricci >= -RICCI_TOL,
        min_ricci,
        c2: volume_growth(profile, r_max)?,
        c3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial_metric::{capped_cone_profile, cone_profile, positive_curvature_profile};
    use std::f64::consts::PI;

    #[test]
    fn flat_volume_constant() {
        let p = cone_profile(1.0, 3).unwrap();
        let v = volume_growth(&p, 2.5).unwrap();
        let want = unit_sphere_measure(3) / 4.0;
        assert!((v - want).abs() < 1e-14 * want);
        assert!((want - PI * PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn capped_cone_volume_matches_cone() {
        let k = 0.7;
        let cone = volume_growth(&cone_profile(k, 4).unwrap(), 1.0).unwrap();
        let capped = volume_growth(&capped_cone_profile(k, 4).unwrap(), 1e3).unwrap();
        assert!(((capped - cone) / cone).abs() < 1e-2);
        let lim = volume_growth_limit(&capped_cone_profile(k, 4).unwrap()).unwrap();
        assert!(((lim.value - cone) / cone).abs() < 1e-6, "{lim:?}");
    }

    #[test]
    fn positive_profile_volume_uses_graph() {
        let p = positive_curvature_profile(0.6, 3).unwrap();
        assert!(volume_growth(&p, 10.0).unwrap() > 0.0);
    }

    #[test]
    fn verdicts() {
        assert_eq!(
            nonexistence_verdict(10.667, 7),
            NonexistenceVerdict::NoStableHypersurface
        );
        assert_eq!(nonexistence_verdict(6.25, 7), NonexistenceVerdict::Inconclusive);
        assert_eq!(nonexistence_verdict(0.0, 3), NonexistenceVerdict::Inconclusive);
    }

    #[test]
    fn capped_cone_conditions() {
        let p = capped_cone_profile(0.8, 3).unwrap();
        let report = condition_check(&p, &log_grid(1e-2, 1e3, 60)).unwrap();
        assert!(report.passes(), "{report:?}");
        let c3 = curvature_decay_limit(&p).unwrap();
        assert!((c3.value - 0.5625).abs() < 1e-6, "{c3:?}");
    }
}
