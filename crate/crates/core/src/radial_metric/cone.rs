use std::sync::Arc;

use super::{check_kappa_half_open, ConformalExponent, ConformalRadialProfile, LinearTail, WarpedProfile, Warping};
use crate::error::{Error, Result};
use crate::numeric::Jet;

/// `λ(ρ) = κρ`: the Euclidean cone over a round sphere of radius `κ`.
#[derive(Debug, Clone, Copy)]
pub struct Cone {
    pub kappa: f64,
}

impl Warping for Cone {
    fn kind(&self) -> &'static str {
        "cone"
    }

    fn lambda(&self, rho: f64) -> Result<f64> {
        Ok(self.kappa * rho)
    }

    fn jet(&self, rho: f64) -> Result<Jet> {
        Ok(Jet {
            value: self.kappa * rho,
            d1: self.kappa,
            d2: 0.0,
        })
    }

    fn pole_regular(&self) -> bool {
        self.kappa == 1.0
    }

    fn asymptotic_slope(&self) -> Option<f64> {
        Some(self.kappa)
    }

    fn linear_tail(&self) -> Option<LinearTail> {
        Some(LinearTail {
            start: 0.0,
            slope: self.kappa,
            value_at_start: 0.0,
        })
    }
}

pub fn cone_profile(kappa: f64, n: usize) -> Result<WarpedProfile> {
    check_kappa_half_open(kappa)?;
    WarpedProfile::new(n, Arc::new(Cone { kappa }))
}

/// `Φ(r) = 2 log κ − 2(1−κ) log r`, the cone metric in the coordinates `ρ = r^κ`.
#[derive(Debug, Clone, Copy)]
pub struct ConeExponent {
    pub kappa: f64,
}

impl ConformalExponent for ConeExponent {
    fn kind(&self) -> &'static str {
        "cone"
    }

    fn jet(&self, r: f64) -> Result<Jet> {
        let k = self.kappa;
        if k == 1.0 {
            return Ok(Jet {
                value: 0.0,
                d1: 0.0,
                d2: 0.0,
            });
        }
        if !(r > 0.0) {
            return Err(Error::PoleEvaluation { r });
        }
        Ok(Jet {
            value: 2.0 * k.ln() - 2.0 * (1.0 - k) * r.ln(),
            d1: -2.0 * (1.0 - k) / r,
            d2: 2.0 * (1.0 - k) / (r * r),
        })
    }

    fn regular_at_origin(&self) -> bool {
        self.kappa == 1.0
    }

    fn warped_radius(&self, r: f64) -> Option<Result<f64>> {
        Some(Ok(r.powf(self.kappa)))
    }
}

pub fn cone_conformal(kappa: f64, n: usize) -> Result<ConformalRadialProfile> {
    check_kappa_half_open(kappa)?;
    ConformalRadialProfile::new(n, Some(kappa), Arc::new(ConeExponent { kappa }))
}
