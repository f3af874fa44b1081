//! A profile with positive sectional curvature everywhere: the rotational
//! graph with radial slope `(2√(1−κ²)/(πκ)) arctan t`.

use std::f64::consts::PI;
use std::sync::Arc;

use super::{check_kappa_open, RadialGraph, RadialSlope, WarpedProfile, Warping};
use crate::error::{Error, Result};
use crate::numeric::Jet;

#[derive(Debug, Clone, Copy)]
struct ArctanSlope {
    a: f64,
}

impl RadialSlope for ArctanSlope {
    fn slope(&self, t: f64) -> f64 {
        self.a * t.atan()
    }

    fn slope_derivative(&self, t: f64) -> f64 {
        self.a / (1.0 + t * t)
    }
}

/// `λ̃` with `λ̃⁻¹(s) = ∫₀ˢ √(1 + (4(1−κ²)/(π²κ²)) arctan²t) dt`.
#[derive(Debug, Clone)]
pub struct PositiveCurvature {
    kappa: f64,
    graph: RadialGraph,
}

/// Largest tabulated value of `λ̃`.
const T_MAX: f64 = 1e12;

impl PositiveCurvature {
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
}

impl Warping for PositiveCurvature {
    fn kind(&self) -> &'static str {
        "positive_curvature"
    }

    fn lambda(&self, rho: f64) -> Result<f64> {
        self.graph.param_at(rho)
    }

    fn jet(&self, rho: f64) -> Result<Jet> {
        Ok(self.graph.jet_at_param(self.graph.param_at(rho)?))
    }

    fn domain(&self) -> (f64, f64) {
        (0.0, self.graph.rho_end())
    }

    fn pole_regular(&self) -> bool {
        true
    }

    fn asymptotic_slope(&self) -> Option<f64> {
        Some(self.kappa)
    }

    fn radial_graph(&self) -> Option<&RadialGraph> {
        Some(&self.graph)
    }
}

pub fn positive_curvature_profile(kappa: f64, n: usize) -> Result<WarpedProfile> {
    check_kappa_open(kappa)?;
    let a = 2.0 * (1.0 - kappa * kappa).sqrt() / (PI * kappa);
    let mut nodes: Vec<f64> = (0..=64).map(|i| i as f64 / 64.0).collect();
    let mut t = 1.0;
    while t < T_MAX {
        t = (t * 1.02).min(T_MAX);
        nodes.push(t);
    }
    let graph = RadialGraph::build(Arc::new(ArctanSlope { a }), nodes)?;
    if !graph.rho_end().is_finite() {
        return Err(Error::IntegrationFailure {
            r: T_MAX,
            reason: "arc-length table overflowed".into(),
        });
    }
    WarpedProfile::new(n, Arc::new(PositiveCurvature { kappa, graph }))
}
