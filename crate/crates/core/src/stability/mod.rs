//! Second variation of minimal cones `CY_ε` in `CS_κ` on the lowest link mode.
//!
//! With the link measure normalized away, the index form of a radial test
//! function is `I(φ,φ) = ∫_ε^1 (cφ² − (n−1)ρφφ′ − ρ²φφ″)ρ^{n−3} dρ` with
//! `c = −|B|² − (n−1)/κ² + (n−1)`. Its spectrum on `[ε, 1]` is
//! `c + (n−2)²/4 + (kπ/log ε)²`.

mod rayleigh;

use std::f64::consts::PI;

pub use rayleigh::rayleigh_min;

use crate::error::{Error, Result};
use crate::numeric::quad::simpson;
use crate::numeric::roots::bisect;
use crate::numeric::tridiag::SymTridiagonal;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeStabilityProblem {
    pub n: usize,
    pub kappa: f64,
    pub b2_link: f64,
    pub epsilon: f64,
}

impl ConeStabilityProblem {
    pub fn new(n: usize, kappa: f64, b2_link: f64, epsilon: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::param("n", n as f64, "hypersurface dimension must be at least 2"));
        }
        if kappa > 1.0 {
            return Err(Error::KappaAboveOne { kappa });
        }
        if !(kappa > 0.0) {
            return Err(Error::param("kappa", kappa, "must lie in (0, 1]"));
        }
        if !(b2_link >= 0.0) {
            return Err(Error::param("B2_link", b2_link, "must be non-negative"));
        }
        check_epsilon(epsilon)?;
        Ok(Self {
            n,
            kappa,
            b2_link,
            epsilon,
        })
    }

    /// `c = −|B|² − (n−1)/κ² + (n−1)`, the zeroth-order coefficient.
    pub fn potential(&self) -> f64 {
        let m = self.n as f64 - 1.0;
        -self.b2_link - m / (self.kappa * self.kappa) + m
    }

    /// `c + (n−2)²/4`.
    pub fn margin(&self) -> f64 {
        stability_margin(self.n, self.kappa, self.b2_link)
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::param("epsilon", epsilon, "must lie in (0, 1)"));
    }
    Ok(())
}

/// `−|B|² − (n−1)/κ² + (n−1) + (n−2)²/4`.
pub fn stability_margin(n: usize, kappa: f64, b2_link: f64) -> f64 {
    let m = n as f64 - 1.0;
    let hardy = (n as f64 - 2.0).powi(2) / 4.0;
    -b2_link - m / (kappa * kappa) + m + hardy
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityVerdict {
    pub stable: bool,
    pub margin: f64,
    pub threshold_kappa: f64,
}

/// Tolerance on the sign of the margin.
pub const MARGIN_TOL: f64 = 1e-12;

/// Hyperplanes through the vertex of `CS_κ` are area-minimizing iff
/// `−(n−1)/κ² + (n−1) + (n−2)²/4 ≥ 0`, i.e. `κ ≥ 2√(n−1)/n`.
pub fn stability_verdict(n: usize, kappa: f64) -> Result<StabilityVerdict> {
    if n < 3 {
        return Err(Error::param("n", n as f64, "must be at least 3"));
    }
    if kappa > 1.0 {
        return Err(Error::KappaAboveOne { kappa });
    }
    if !(kappa > 0.0) {
        return Err(Error::param("kappa", kappa, "must lie in (0, 1]"));
    }
    let margin = stability_margin(n, kappa, 0.0);
    Ok(StabilityVerdict {
        stable: margin >= -MARGIN_TOL,
        margin,
        threshold_kappa: 2.0 * ((n - 1) as f64).sqrt() / n as f64,
    })
}

/// The `κ` where the margin changes sign, found by bisection.
pub fn locate_threshold(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::param("n", n as f64, "must be at least 3"));
    }
    bisect(|k| stability_margin(n, k, 0.0), 0.05, 1.0, 1e-15)
}

/// `ρ^{(2−n)/2} sin(kπ log ρ / log ε)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialEigenfunction {
    pub n: usize,
    pub epsilon: f64,
    pub k: usize,
}

impl RadialEigenfunction {
    fn parts(&self) -> (f64, f64) {
        let a = (2.0 - self.n as f64) / 2.0;
        let b = self.k as f64 * PI / self.epsilon.ln();
        (a, b)
    }
}

/// A radial test function on `[ε, 1]`.
pub trait RadialTestFunction {
    fn value(&self, rho: f64) -> f64;
    fn derivative(&self, rho: f64) -> f64;
    fn second_derivative(&self, _rho: f64) -> Option<f64> {
        None
    }
}

impl RadialTestFunction for RadialEigenfunction {
    fn value(&self, rho: f64) -> f64 {
        let (a, b) = self.parts();
        rho.powf(a) * (b * rho.ln()).sin()
    }

    fn derivative(&self, rho: f64) -> f64 {
        let (a, b) = self.parts();
        let s = rho.ln();
        rho.powf(a - 1.0) * (a * (b * s).sin() + b * (b * s).cos())
    }

    fn second_derivative(&self, rho: f64) -> Option<f64> {
        let (a, b) = self.parts();
        let s = rho.ln();
        Some(rho.powf(a - 2.0) * ((a * a - a - b * b) * (b * s).sin() + b * (2.0 * a - 1.0) * (b * s).cos()))
    }
}

/// `k`-th Dirichlet eigenvalue of `−(ρ²∂²_ρ + (n−1)ρ∂_ρ)` on `[ε, 1]` and
/// its eigenfunction.
pub fn radial_eigenvalue(n: usize, epsilon: f64, k: usize) -> Result<(f64, RadialEigenfunction)> {
    check_epsilon(epsilon)?;
    if k == 0 {
        return Err(Error::param("k", 0.0, "modes are numbered from 1"));
    }
    let value = (n as f64 - 2.0).powi(2) / 4.0 + (k as f64 * PI / epsilon.ln()).powi(2);
    Ok((value, RadialEigenfunction { n, epsilon, k }))
}

/// The same eigenvalue from a finite-difference discretization in
/// `s = log ρ` on `grid_points` nodes (including both ends).
///
/// The operator is `−w⁻¹(w u_s)_s` with `w = e^{(n−2)s}`; half-node weights
/// and the substitution `v = √w u` give a symmetric tridiagonal matrix with
/// off-diagonal `−1/h²` and diagonal `2cosh((n−2)h/2)/h²`.
pub fn radial_eigenvalue_fd(n: usize, epsilon: f64, k: usize, grid_points: usize) -> Result<f64> {
    check_epsilon(epsilon)?;
    if grid_points < 64 {
        return Err(Error::param(
            "grid_points",
            grid_points as f64,
            "need at least 64 nodes",
        ));
    }
    let interior = grid_points - 2;
    if k == 0 || k > interior {
        return Err(Error::param("k", k as f64, "mode outside the discrete spectrum"));
    }
    let h = -epsilon.ln() / (grid_points - 1) as f64;
    let beta = (n as f64 - 2.0) / 2.0;
    let diag = vec![2.0 * (beta * h).cosh() / (h * h); interior];
    let off = vec![-1.0 / (h * h); interior - 1];
    SymTridiagonal::new(diag, off)?
        .eigenvalue(k)
        .map_err(|e| Error::Eigen(e.to_string()))
}

/// Panels of the composite Simpson rule in `s = log ρ`.
pub const INDEX_FORM_PANELS: usize = 1 << 12;

/// `I(φ,φ)`. Uses `φ″` when supplied, otherwise the integrated-by-parts form
/// `∫(cφ²ρ^{n−3} + φ′²ρ^{n−1})`.
pub fn index_form(problem: &ConeStabilityProblem, phi: &dyn RadialTestFunction) -> Result<f64> {
    check_boundary(problem, phi)?;
    let c = problem.potential();
    let n = problem.n as f64;
    let lo = problem.epsilon.ln();
    let has_second = phi.second_derivative(0.5 * (1.0 + problem.epsilon)).is_some();
    // dρ = ρ ds
    let integrand = |s: f64| {
        let rho = s.exp();
        let f = phi.value(rho);
        let fp = phi.derivative(rho);
        let weight = rho.powf(n - 2.0);
        if has_second {
            let fpp = phi.second_derivative(rho).unwrap_or(0.0);
            (c * f * f - (n - 1.0) * rho * f * fp - rho * rho * f * fpp) * weight
        } else {
            (c * f * f + rho * rho * fp * fp) * weight
        }
    };
    Ok(simpson(integrand, lo, 0.0, INDEX_FORM_PANELS))
}

/// `‖φ‖² = ∫_ε^1 φ² ρ^{n−3} dρ`.
pub fn weighted_norm_sq(problem: &ConeStabilityProblem, phi: &dyn RadialTestFunction) -> f64 {
    let n = problem.n as f64;
    simpson(
        |s: f64| {
            let rho = s.exp();
            phi.value(rho).powi(2) * rho.powf(n - 2.0)
        },
        problem.epsilon.ln(),
        0.0,
        INDEX_FORM_PANELS,
    )
}

fn check_boundary(problem: &ConeStabilityProblem, phi: &dyn RadialTestFunction) -> Result<()> {
    let lo = problem.epsilon.ln();
    let sup = (0..=64)
        .map(|i| phi.value((lo * i as f64 / 64.0).exp()).abs())
        .fold(0.0, f64::max);
    for rho in [problem.epsilon, 1.0] {
        let v = phi.value(rho);
        if v.abs() > 1e-10 * sup.max(1e-300) {
            return Err(Error::NonzeroBoundary { rho, value: v });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalue_examples() {
        let e = (-PI).exp();
        assert!((radial_eigenvalue(7, e, 1).unwrap().0 - 7.25).abs() < 1e-14);
        let (v, _) = radial_eigenvalue(2, 0.01, 3).unwrap();
        assert!((v - (3.0 * PI / 0.01f64.ln()).powi(2)).abs() < 1e-14);
        let fd = radial_eigenvalue_fd(7, e, 1, 10_000).unwrap();
        assert!(((fd - 7.25) / 7.25).abs() < 1e-3);
    }

    #[test]
    fn eigenfunction_vanishes_at_ends_and_oscillates() {
        for k in 1..=4 {
            let (_, f) = radial_eigenvalue(5, 1e-3, k).unwrap();
            assert!(f.value(1.0).abs() < 1e-12);
            assert!(f.value(1e-3).abs() < 1e-9);
            let lo = 1e-3f64.ln();
            let samples: Vec<f64> = (1..1000).map(|i| f.value((lo * i as f64 / 1000.0).exp())).collect();
            let changes = samples.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
            assert_eq!(changes, k - 1);
        }
    }

    #[test]
    fn verdict_examples() {
        let v = stability_verdict(7, 1.0).unwrap();
        assert!(v.stable && (v.margin - 6.25).abs() < 1e-14);
        assert!((v.threshold_kappa - 0.699_854_212_223_765).abs() < 1e-12);
        let v = stability_verdict(7, 0.6).unwrap();
        assert!(!v.stable && (v.margin + 4.416_666_666_666_667).abs() < 1e-12);
        assert_eq!(stability_margin(7, 1.0, 6.0), 0.25);
    }

    #[test]
    fn index_form_identity() {
        let p = ConeStabilityProblem::new(7, 0.8, 0.0, 1e-2).unwrap();
        let (lam, f) = radial_eigenvalue(7, 1e-2, 1).unwrap();
        let want = (p.potential() + lam) * weighted_norm_sq(&p, &f);
        let direct = index_form(&p, &f).unwrap();
        struct FirstOrder(RadialEigenfunction);
        impl RadialTestFunction for FirstOrder {
            fn value(&self, rho: f64) -> f64 {
                self.0.value(rho)
            }
            fn derivative(&self, rho: f64) -> f64 {
                self.0.derivative(rho)
            }
        }
        let by_parts = index_form(&p, &FirstOrder(f)).unwrap();
        assert!(((direct - want) / want).abs() < 1e-10);
        assert!(((by_parts - want) / want).abs() < 1e-10);
    }

    #[test]
    fn nonzero_boundary_is_rejected() {
        struct Bump;
        impl RadialTestFunction for Bump {
            fn value(&self, rho: f64) -> f64 {
                rho
            }
            fn derivative(&self, _rho: f64) -> f64 {
                1.0
            }
        }
        let p = ConeStabilityProblem::new(4, 0.9, 0.0, 0.1).unwrap();
        assert!(matches!(index_form(&p, &Bump), Err(Error::NonzeroBoundary { .. })));
    }
}
