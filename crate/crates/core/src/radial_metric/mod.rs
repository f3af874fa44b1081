//! Rotationally symmetric metrics `dρ² + λ(ρ)² dθ²` on `R^{n+1}` and their
//! conformally flat rewritings `e^{Φ(r)} Σ dxᵢ²`.
//!
//! Profiles are immutable once built and can be shared across threads.

mod cap;
mod conditions;
mod cone;
mod conformal;
mod curvature;
mod positive;
mod table;

use std::fmt;
use std::sync::Arc;

pub use cap::{
    cap_function, cap_slope, capped_cone_profile, capped_cone_profile_with_cap, ArctanCap, CappedCone, RadialGraph,
    RadialSlope,
};
pub use conditions::{
    condition_check, curvature_decay_limit, log_grid, nonexistence_verdict, nonradial_ricci_constant, volume_growth,
    volume_growth_limit, ConditionReport, NonexistenceVerdict,
};
pub use cone::{cone_conformal, cone_profile, Cone, ConeExponent};
pub use conformal::{warped_to_conformal, ChartExponent, ConformalExponent, ConformalRadialProfile};
pub use curvature::{curvature, CurvatureReport};
pub use positive::{positive_curvature_profile, PositiveCurvature};
pub use table::TableWarp;

use crate::error::{Error, Result};
use crate::numeric::Jet;

/// Radius-to-warping function `λ(ρ)`.
pub trait Warping: fmt::Debug + Send + Sync {
    fn kind(&self) -> &'static str;

    fn lambda(&self, rho: f64) -> Result<f64>;

    /// `λ, λ′, λ″` at `ρ`. The default uses central differences with
    /// `h = max(1e-5, 1e-5·ρ)`, shrunk to stay inside the domain.
    fn jet(&self, rho: f64) -> Result<Jet> {
        let (lo, hi) = self.domain();
        let mut h = (1e-5f64).max(1e-5 * rho);
        h = h.min(0.5 * (rho - lo)).min(0.5 * (hi - rho));
        if !(h > 0.0) {
            return Err(Error::OutsideDomain { rho, min: lo, max: hi });
        }
        crate::numeric::central_jet(|x| self.lambda(x), rho, h)
    }

    /// Valid evaluation range `[domain_min, domain_max]`.
    fn domain(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }

    /// True iff `λ′(0⁺) = 1`.
    fn pole_regular(&self) -> bool;

    fn asymptotic_slope(&self) -> Option<f64> {
        None
    }

    fn linear_tail(&self) -> Option<LinearTail> {
        None
    }

    /// Arc-length parametrization as the profile curve of a rotational graph.
    fn radial_graph(&self) -> Option<&RadialGraph> {
        None
    }
}

/// `λ(ρ) = value_at_start + slope·(ρ − start)` for `ρ ≥ start`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearTail {
    pub start: f64,
    pub slope: f64,
    pub value_at_start: f64,
}

/// A warped-product metric `dρ² + λ²(ρ) dθ²` on an `(n+1)`-manifold.
///
/// `n` is the dimension of the round spheres `θ ∈ Sⁿ`; the ambient
/// dimension is `n + 1`.
#[derive(Clone)]
pub struct WarpedProfile {
    n: usize,
    warp: Arc<dyn Warping>,
}

impl fmt::Debug for WarpedProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WarpedProfile")
            .field("n", &self.n)
            .field("warp", &self.warp)
            .finish()
    }
}

impl WarpedProfile {
    pub fn new(n: usize, warp: Arc<dyn Warping>) -> Result<Self> {
        if n < 2 {
            return Err(Error::param("n", n as f64, "ambient dimension n+1 must be at least 3"));
        }
        Ok(Self { n, warp })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_ambient(&self) -> usize {
        self.n + 1
    }

    pub fn kind(&self) -> &'static str {
        self.warp.kind()
    }

    pub fn warp(&self) -> &Arc<dyn Warping> {
        &self.warp
    }

    pub fn pole_regular(&self) -> bool {
        self.warp.pole_regular()
    }

    pub fn domain_min(&self) -> f64 {
        self.warp.domain().0
    }

    pub fn domain_max(&self) -> f64 {
        self.warp.domain().1
    }

    pub fn asymptotic_slope(&self) -> Option<f64> {
        self.warp.asymptotic_slope()
    }

    pub fn linear_tail(&self) -> Option<LinearTail> {
        self.warp.linear_tail()
    }

    fn check_domain(&self, rho: f64) -> Result<()> {
        let (lo, hi) = self.warp.domain();
        if rho.is_nan() || rho < lo || rho > hi {
            return Err(Error::OutsideDomain { rho, min: lo, max: hi });
        }
        Ok(())
    }

    pub fn lambda(&self, rho: f64) -> Result<f64> {
        self.check_domain(rho)?;
        self.warp.lambda(rho)
    }

    pub fn jet(&self, rho: f64) -> Result<Jet> {
        self.check_domain(rho)?;
        self.warp.jet(rho)
    }

    /// Smallest sampled `λ`; positive for a valid profile.
    pub fn min_lambda(&self, samples: &[f64]) -> Result<f64> {
        samples
            .iter()
            .try_fold(f64::INFINITY, |acc, &rho| Ok(acc.min(self.lambda(rho)?)))
    }

    /// Checks `λ″ ≤ tol` and `|λ′| ≤ 1 + tol` at every sample, the sampled form
    /// of non-negative sectional curvature.
    pub fn has_nonnegative_sectional_curvature(&self, samples: &[f64], tol: f64) -> Result<bool> {
        for &rho in samples {
            let j = self.jet(rho)?;
            if j.d2 > tol || j.d1.abs() > 1.0 + tol {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub(crate) fn check_kappa_open(kappa: f64) -> Result<()> {
    if kappa > 1.0 {
        return Err(Error::KappaAboveOne { kappa });
    }
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::param("kappa", kappa, "must lie in (0, 1)"));
    }
    Ok(())
}

pub(crate) fn check_kappa_half_open(kappa: f64) -> Result<()> {
    if kappa > 1.0 {
        return Err(Error::KappaAboveOne { kappa });
    }
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::param("kappa", kappa, "must lie in (0, 1]"));
    }
    Ok(())
}
