//! Seeded agreement check of the three forms of `𝔏` on random polar fields.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::fields::{polar_point, Polar, PolarMonomialSum, ScalarField, ScalarFieldPolar};
use super::operator::{l_conformal, l_fd_oracle, l_polar};
use crate::error::{Error, Result};
use crate::radial_metric::ConformalRadialProfile;

/// Pairwise tolerance `max(abs, rel·|value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrosscheckOptions {
    pub fields: usize,
    pub seed: u64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Step of the finite-difference oracle.
    pub h: f64,
    pub r_range: (f64, f64),
    pub theta_max: f64,
}

impl Default for CrosscheckOptions {
    fn default() -> Self {
        Self {
            fields: 100,
            seed: 0,
            abs_tol: 1e-6,
            rel_tol: 1e-4,
            h: 1e-4,
            r_range: (0.3, 3.0),
            theta_max: 0.9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrosscheckRow {
    pub field: String,
    pub theta: f64,
    pub r: f64,
    pub conformal: f64,
    pub polar: f64,
    pub fd: f64,
    /// Largest pairwise gap over its tolerance; `≤ 1` passes.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrosscheckReport {
    pub rows: Vec<CrosscheckRow>,
    pub worst_ratio: f64,
}

impl CrosscheckReport {
    pub fn passed(&self) -> bool {
        self.worst_ratio <= 1.0
    }

    /// Columns `theta r conformal polar fd ratio`.
    pub fn table(&self) -> String {
        let mut out = String::from("theta r conformal polar fd ratio\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{:.11e} {:.11e} {:.11e} {:.11e} {:.11e} {:.11e}\n",
                row.theta, row.r, row.conformal, row.polar, row.fd, row.ratio
            ));
        }
        out
    }
}

fn random_unit<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 0.1 && norm <= 1.0 {
            return v.iter().map(|a| a / norm).collect();
        }
    }
}

/// Evaluates `l_conformal`, `l_polar` and `l_fd_oracle` for `opts.fields`
/// random [`PolarMonomialSum`] fields, each at one random point.
pub fn triple_path_crosscheck(metric: &ConformalRadialProfile, opts: CrosscheckOptions) -> Result<CrosscheckReport> {
    let (r_lo, r_hi) = opts.r_range;
    if !(r_lo > 0.0 && r_hi > r_lo) {
        return Err(Error::param("r_range", r_lo, "needs 0 < r_min < r_max"));
    }
    if !(opts.theta_max > 0.0 && opts.theta_max < 1.0) {
        return Err(Error::param("theta_max", opts.theta_max, "must lie in (0, 1)"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut rows = Vec::with_capacity(opts.fields);
    for _ in 0..opts.fields {
        let field = PolarMonomialSum::random(&mut rng);
        let theta = rng.gen_range(-opts.theta_max..opts.theta_max);
        let r = (rng.gen_range(r_lo.ln()..r_hi.ln())).exp();
        let e = random_unit(&mut rng, metric.n());
        let x = polar_point(theta, r, &e);
        let cartesian = Polar(field.clone());
        let conformal = l_conformal(metric, &cartesian, &x)?;
        let polar = l_polar(metric, &field, theta, r)?;
        let fd = l_fd_oracle(metric, &cartesian as &dyn ScalarField, &x, opts.h)?;
        let ratio = [(conformal, polar), (conformal, fd), (polar, fd)]
            .iter()
            .map(|&(a, b)| (a - b).abs() / opts.abs_tol.max(opts.rel_tol * a.abs().max(b.abs())))
            .fold(0.0, f64::max);
        rows.push(CrosscheckRow {
            field: field.label(),
            theta,
            r,
            conformal,
            polar,
            fd,
            ratio,
        });
    }
    let worst_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(CrosscheckReport { rows, worst_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial_metric::{capped_cone_profile, cone_conformal, warped_to_conformal};

    #[test]
    fn forms_agree_on_cone_and_capped_cone() {
        let opts = CrosscheckOptions {
            fields: 20,
            ..Default::default()
        };
        let cone = triple_path_crosscheck(&cone_conformal(0.8, 4).unwrap(), opts).unwrap();
        assert!(cone.passed(), "{}", cone.worst_ratio);
        let capped = warped_to_conformal(&capped_cone_profile(0.8, 4).unwrap()).unwrap();
        let report = triple_path_crosscheck(&capped, opts).unwrap();
        assert!(report.passed(), "{}", report.worst_ratio);
    }

    #[test]
    fn same_seed_same_table() {
        let m = cone_conformal(0.9, 3).unwrap();
        let opts = CrosscheckOptions {
            fields: 5,
            seed: 11,
            ..Default::default()
        };
        let a = triple_path_crosscheck(&m, opts).unwrap().table();
        let b = triple_path_crosscheck(&m, opts).unwrap().table();
        assert_eq!(a, b);
    }
}
