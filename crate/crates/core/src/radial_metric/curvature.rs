use super::WarpedProfile;
use crate::error::{Error, Result};

/// Sectional and Ricci curvatures of `dρ² + λ²dθ²` at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureReport {
    pub rho: f64,
    /// Planes containing `∂/∂ρ`: `−λ″/λ`.
    pub k_radial: f64,
    /// Planes tangent to the spheres: `(1−λ′²)/λ²`.
    pub k_spherical: f64,
    pub ric_radial: f64,
    pub ric_spherical: f64,
}

pub fn curvature(profile: &WarpedProfile, rho: f64) -> Result<CurvatureReport> {
    if !(rho > 0.0) {
        if profile.pole_regular() && rho == 0.0 {
            return Err(Error::param("rho", rho, "curvature is evaluated for rho > 0"));
        }
        return Err(Error::PoleEvaluation { r: rho });
    }
    let j = profile.jet(rho)?;
    let n = profile.n() as f64;
    let k_radial = -j.d2 / j.value;
    let k_spherical = (1.0 - j.d1 * j.d1) / (j.value * j.value);
    Ok(CurvatureReport {
        rho,
        k_radial,
        k_spherical,
        ric_radial: n * k_radial,
        ric_spherical: (n - 1.0) * k_spherical + k_radial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial_metric::{capped_cone_profile, cone_profile};

    #[test]
    fn cone_curvature_closed_form() {
        for &k in &[0.3, 0.5, 0.8, 1.0] {
            let p = cone_profile(k, 6).unwrap();
            for &rho in &[0.1, 1.0, 10.0] {
                let c = curvature(&p, rho).unwrap();
                assert_eq!(c.k_radial, 0.0);
                let want = 5.0 * (1.0 / (k * k) - 1.0) / (rho * rho);
                assert!((c.ric_spherical - want).abs() <= 1e-10 * want.abs().max(1e-300));
            }
        }
    }

    #[test]
    fn pole_of_singular_cone_is_rejected() {
        let p = cone_profile(0.5, 3).unwrap();
        assert!(matches!(curvature(&p, 0.0), Err(Error::PoleEvaluation { .. })));
    }

    #[test]
    fn capped_cone_tail() {
        let k = 0.8;
        let p = capped_cone_profile(k, 3).unwrap();
        let rho0 = p.linear_tail().unwrap().start;
        let rho = rho0 + 2.0;
        let c = curvature(&p, rho).unwrap();
        let want = (1.0 - k * k) / (k * k * (rho + 1.0 / k - rho0).powi(2));
        assert!((c.k_spherical - want).abs() < 1e-13);
        assert_eq!(c.k_radial, 0.0);
    }
}
