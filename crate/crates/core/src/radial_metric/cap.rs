//! Smooth convex caps and the capped cone `MCS_κ`.
//!
//! The cap is the graph of a rotationally symmetric convex function `Λ(r)`
//! over the unit ball, glued to the cone `Λ = (√(1−κ²)/κ) r` outside. Its
//! induced metric is `dρ² + λ²(ρ)dθ²` where `ρ(t) = ∫₀ᵗ √(1+Λ′²)` is arc
//! length along the profile curve and `λ(ρ(t)) = t`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::Arc;

use super::{check_kappa_open, LinearTail, WarpedProfile, Warping};
use crate::error::{Error, Result};
use crate::numeric::quad::{gk15, integrate, QuadOptions};
use crate::numeric::roots::solve_monotone;
use crate::numeric::Jet;

/// Radial slope `g(t) = Λ′(t)` of a rotational graph, with its derivative.
pub trait RadialSlope: fmt::Debug + Send + Sync {
    fn slope(&self, t: f64) -> f64;
    fn slope_derivative(&self, t: f64) -> f64;
}

/// `Λ′(t) = (2√(1−κ²)/(κπ)) arctan ξ(t)` with `ξ(s) = s(e^{1/(1−s²)} − e)`.
#[derive(Debug, Clone, Copy)]
pub struct ArctanCap {
    kappa: f64,
    scale: f64,
}

impl ArctanCap {
    pub fn new(kappa: f64) -> Result<Self> {
        check_kappa_open(kappa)?;
        Ok(Self {
            kappa,
            scale: 2.0 * (1.0 - kappa * kappa).sqrt() / (kappa * PI),
        })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `(arctan ξ(t), ξ′(t)/(1+ξ(t)²))`, stable up to and past `t = 1`.
    fn arctan_xi(t: f64) -> (f64, f64) {
        if t <= 0.0 {
            return (0.0, 0.0);
        }
        if t >= 1.0 {
            return (FRAC_PI_2, 0.0);
        }
        let e = 1.0 / (1.0 - t * t);
        if e > 200.0 {
            // ξ ≈ t e^{E}; arctan ξ = π/2 − 1/ξ + …
            let inv = (-e).exp() / t;
            let ratio = (1.0 + 2.0 * t * t * e * e) * (-e).exp() / (t * t);
            return (FRAC_PI_2 - inv, ratio);
        }
        let x = e.exp();
        let xi = t * (x - std::f64::consts::E);
        let dxi = x - std::f64::consts::E + 2.0 * t * t * e * e * x;
        (xi.atan(), dxi / (1.0 + xi * xi))
    }
}

impl RadialSlope for ArctanCap {
    fn slope(&self, t: f64) -> f64 {
        self.scale * Self::arctan_xi(t).0
    }

    fn slope_derivative(&self, t: f64) -> f64 {
        self.scale * Self::arctan_xi(t).1
    }
}

/// The cap function `Λ(r)`; linear for `r ≥ 1`, an arctan integral inside.
pub fn cap_function(r: f64, kappa: f64) -> Result<f64> {
    check_kappa_open(kappa)?;
    if !(r >= 0.0) {
        return Err(Error::param("r", r, "must be non-negative"));
    }
    let a = (1.0 - kappa * kappa).sqrt() / kappa;
    if r >= 1.0 {
        return Ok(a * r);
    }
    let inner = integrate(|s| ArctanCap::arctan_xi(s).0, r, 1.0, QuadOptions::default())?;
    Ok(a * (1.0 - 2.0 / PI * inner.value))
}

/// Analytic radial derivative `Λ′(r)`.
pub fn cap_slope(r: f64, kappa: f64) -> Result<f64> {
    Ok(ArctanCap::new(kappa)?.slope(r))
}

/// Profile curve of a rotational graph, parametrized by the Euclidean radius
/// `t` and tabulated in arc length.
#[derive(Debug, Clone)]
pub struct RadialGraph {
    shape: Arc<dyn RadialSlope>,
    t_nodes: Vec<f64>,
    rho_nodes: Vec<f64>,
}

impl RadialGraph {
    pub fn build(shape: Arc<dyn RadialSlope>, t_nodes: Vec<f64>) -> Result<Self> {
        let opts = QuadOptions {
            abs_tol: 1e-15,
            rel_tol: 1e-14,
            max_panels: 1 << 10,
        };
        let mut rho_nodes = Vec::with_capacity(t_nodes.len());
        rho_nodes.push(0.0);
        let mut acc = 0.0;
        for w in t_nodes.windows(2) {
            let s = Arc::clone(&shape);
            let piece = integrate(move |t| (1.0 + s.slope(t).powi(2)).sqrt(), w[0], w[1], opts)?;
            acc += piece.value;
            rho_nodes.push(acc);
        }
        Ok(Self {
            shape,
            t_nodes,
            rho_nodes,
        })
    }

    pub fn shape(&self) -> &Arc<dyn RadialSlope> {
        &self.shape
    }

    pub fn t_nodes(&self) -> &[f64] {
        &self.t_nodes
    }

    pub fn t_end(&self) -> f64 {
        *self.t_nodes.last().expect("graph has nodes")
    }

    pub fn rho_end(&self) -> f64 {
        *self.rho_nodes.last().expect("graph has nodes")
    }

    fn arc_integrand(&self, t: f64) -> f64 {
        (1.0 + self.shape.slope(t).powi(2)).sqrt()
    }

    /// Arc length `ρ(t)`.
    pub fn arc_length(&self, t: f64) -> f64 {
        let j = self.panel_of(&self.t_nodes, t);
        self.rho_nodes[j] + gk15(&|s| self.arc_integrand(s), self.t_nodes[j], t).0
    }

    fn panel_of(&self, nodes: &[f64], x: f64) -> usize {
        let p = nodes.partition_point(|&v| v <= x);
        p.saturating_sub(1).min(nodes.len() - 2)
    }

    /// Inverse of the arc length: the parameter `t` with `ρ(t) = rho`.
    pub fn param_at(&self, rho: f64) -> Result<f64> {
        if rho <= 0.0 {
            return Ok(0.0);
        }
        let j = self.panel_of(&self.rho_nodes, rho);
        let (t0, t1) = (self.t_nodes[j], self.t_nodes[j + 1]);
        let base = self.rho_nodes[j];
        solve_monotone(
            |t| {
                let v = base + gk15(&|s| self.arc_integrand(s), t0, t).0;
                (v, self.arc_integrand(t))
            },
            rho,
            t0,
            t1,
            1e-13,
        )
    }

    /// `λ, λ′, λ″` at the point with parameter `t` (where `λ = t`).
    pub fn jet_at_param(&self, t: f64) -> Jet {
        let g = self.shape.slope(t);
        let gp = self.shape.slope_derivative(t);
        let q = 1.0 + g * g;
        Jet {
            value: t,
            d1: 1.0 / q.sqrt(),
            d2: -g * gp / (q * q),
        }
    }
}

/// `MCS_κ`: cap for `ρ ≤ ρ₀`, then `λ = κ(ρ + 1/κ − ρ₀)`.
#[derive(Debug, Clone)]
pub struct CappedCone {
    kappa: f64,
    graph: RadialGraph,
    rho0: f64,
}

impl CappedCone {
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Arc length of the cap, `ρ₀ = ∫₀¹ √(1+Λ′²)`.
    pub fn rho0(&self) -> f64 {
        self.rho0
    }

    pub fn graph(&self) -> &RadialGraph {
        &self.graph
    }
}

impl Warping for CappedCone {
    fn kind(&self) -> &'static str {
        "capped_cone"
    }

    fn lambda(&self, rho: f64) -> Result<f64> {
        if rho <= self.rho0 {
            self.graph.param_at(rho)
        } else {
            Ok(self.graph.t_end() + self.kappa * (rho - self.rho0))
        }
    }

    fn jet(&self, rho: f64) -> Result<Jet> {
        if rho <= self.rho0 {
            Ok(self.graph.jet_at_param(self.graph.param_at(rho)?))
        } else {
            Ok(Jet {
                value: self.graph.t_end() + self.kappa * (rho - self.rho0),
                d1: self.kappa,
                d2: 0.0,
            })
        }
    }

    fn pole_regular(&self) -> bool {
        true
    }

    fn asymptotic_slope(&self) -> Option<f64> {
        Some(self.kappa)
    }

    fn linear_tail(&self) -> Option<LinearTail> {
        Some(LinearTail {
            start: self.rho0,
            slope: self.kappa,
            value_at_start: self.graph.t_end(),
        })
    }

    fn radial_graph(&self) -> Option<&RadialGraph> {
        Some(&self.graph)
    }
}

const CAP_PANELS: usize = 1024;

pub fn capped_cone_profile(kappa: f64, n: usize) -> Result<WarpedProfile> {
    capped_cone_profile_with_cap(kappa, n, Arc::new(ArctanCap::new(kappa)?))
}

/// Capped cone with a caller-supplied cap slope on `[0, 1]`.
///
/// The cap must satisfy `g(0) = 0` and `g(1) = √(1−κ²)/κ` so that the glued
/// profile is `C¹`.
pub fn capped_cone_profile_with_cap(kappa: f64, n: usize, cap: Arc<dyn RadialSlope>) -> Result<WarpedProfile> {
    check_kappa_open(kappa)?;
    let edge = (1.0 - kappa * kappa).sqrt() / kappa;
    if cap.slope(0.0).abs() > 1e-12 {
        return Err(Error::param(
            "cap slope at 0",
            cap.slope(0.0),
            "must vanish at the axis",
        ));
    }
    if (cap.slope(1.0) - edge).abs() > 1e-10 {
        return Err(Error::param(
            "cap slope at 1",
            cap.slope(1.0),
            format!("must equal sqrt(1-kappa^2)/kappa = {edge}"),
        ));
    }
    let nodes: Vec<f64> = (0..=CAP_PANELS).map(|i| i as f64 / CAP_PANELS as f64).collect();
    let graph = RadialGraph::build(cap, nodes)?;
    let rho0 = graph.rho_end();
    if !(rho0 > 1.0 && rho0 < 1.0 / kappa) {
        return Err(Error::param(
            "rho0",
            rho0,
            format!("cap arc length must lie in (1, 1/kappa = {})", 1.0 / kappa),
        ));
    }
    WarpedProfile::new(n, Arc::new(CappedCone { kappa, graph, rho0 }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_branch_of_cap() {
        assert!((cap_function(1.5, 0.8).unwrap() - 1.125).abs() < 1e-15);
    }

    #[test]
    fn cap_rejects_degenerate_kappa() {
        assert!(cap_function(0.5, 1.0).is_err());
        assert!(cap_function(0.5, 0.0).is_err());
        assert!(capped_cone_profile(1.0, 3).is_err());
    }

    #[test]
    fn cap_slope_vanishes_on_axis_and_matches_cone_at_edge() {
        assert_eq!(cap_slope(0.0, 0.7).unwrap(), 0.0);
        assert!(cap_slope(1e-3, 0.7).unwrap() < 1e-8);
        let edge = (1.0f64 - 0.49).sqrt() / 0.7;
        assert!((cap_slope(1.0 - 1e-9, 0.7).unwrap() - edge).abs() < 1e-14);
    }

    #[test]
    fn cap_is_convex() {
        let cap = ArctanCap::new(0.6).unwrap();
        let mut prev = 0.0;
        for i in 0..=1000 {
            let t = i as f64 / 1000.0;
            assert!(cap.slope_derivative(t) >= 0.0);
            let s = cap.slope(t);
            assert!(s >= prev - 1e-15);
            prev = s;
        }
    }

    #[test]
    fn cap_function_is_continuous_at_one() {
        let inside = cap_function(1.0 - 1e-12, 0.5).unwrap();
        let outside = cap_function(1.0, 0.5).unwrap();
        assert!((inside - outside).abs() < 1e-10);
    }

    // high-precision quadrature of the defining integrals
    #[test]
    fn rho0_and_cap_values_match_reference() {
        let p = capped_cone_profile(0.8, 3).unwrap();
        let rho0 = p.linear_tail().unwrap().start;
        assert!((rho0 - 1.088_333_099_850_345_3).abs() < 1e-12);
        let p = capped_cone_profile(0.3, 3).unwrap();
        assert!((p.linear_tail().unwrap().start - 1.895_943_965_869_390_6).abs() < 1e-12);
        assert!((cap_function(0.5, 0.8).unwrap() - 0.451_690_666_098_300_9).abs() < 1e-10);
        assert!((cap_function(0.0, 0.8).unwrap() - 0.425_307_103_030_888_1).abs() < 1e-10);
    }

    #[test]
    fn arc_length_inverts() {
        let p = capped_cone_profile(0.75, 4).unwrap();
        let graph = p.warp().radial_graph().unwrap();
        for &t in &[0.0, 0.01, 0.3, 0.77, 0.999] {
            let rho = graph.arc_length(t);
            assert!((graph.param_at(rho).unwrap() - t).abs() < 1e-12);
        }
    }

    #[test]
    fn bad_cap_is_rejected() {
        #[derive(Debug)]
        struct Steep;
        impl RadialSlope for Steep {
            fn slope(&self, t: f64) -> f64 {
                3.0 * t
            }
            fn slope_derivative(&self, _t: f64) -> f64 {
                3.0
            }
        }
        assert!(capped_cone_profile_with_cap(0.8, 3, Arc::new(Steep)).is_err());
    }
}
