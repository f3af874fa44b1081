//! The barrier `F = Cθr^p` and the check of its sign pattern
//! `θ·𝔏F ≥ 0` away from the origin.

use rayon::prelude::*;

use super::fields::{polar_point, CartesianJet, PolarJet, ScalarField, ScalarFieldPolar};
use super::operator::{l_conformal_groups, l_polar_groups};
use crate::error::{Error, Result};
use crate::radial_metric::{log_grid, ConformalRadialProfile};
use nalgebra::{DMatrix, DVector};

/// `κ* = 2√(n−1)/n`.
pub fn threshold_kappa(n: usize) -> f64 {
    2.0 * ((n - 1) as f64).sqrt() / n as f64
}

/// `p = nκ/2 − √(n²κ²/4 − (n−1))`.
pub fn barrier_exponent(n: usize, kappa: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::param("n", n as f64, "barrier needs n >= 3"));
    }
    if kappa > 1.0 {
        return Err(Error::KappaAboveOne { kappa });
    }
    if !(kappa > 0.0) {
        return Err(Error::param("kappa", kappa, "must be positive"));
    }
    let nf = n as f64;
    let mut disc = nf * nf * kappa * kappa / 4.0 - (nf - 1.0);
    if disc < 0.0 {
        // κ = κ* rounds to a discriminant of a few ulps either side
        if disc > -1e-12 * (nf - 1.0) {
            disc = 0.0;
        } else {
            return Err(Error::BelowThreshold {
                n,
                kappa,
                kappa_star: threshold_kappa(n),
            });
        }
    }
    Ok(nf * kappa / 2.0 - disc.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierSpec {
    pub c: f64,
    pub p: f64,
    pub n: usize,
    pub kappa: f64,
}

impl BarrierSpec {
    pub fn new(n: usize, kappa: f64, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::param("C", c, "amplitude must be positive"));
        }
        Ok(Self {
            c,
            p: barrier_exponent(n, kappa)?,
            n,
            kappa,
        })
    }

    pub fn field(&self) -> BarrierField {
        BarrierField { c: self.c, p: self.p }
    }
}

/// `F(θ, r) = Cθr^p`.
#[derive(Debug, Clone, Copy)]
pub struct BarrierField {
    pub c: f64,
    pub p: f64,
}

impl ScalarFieldPolar for BarrierField {
    fn label(&self) -> String {
        format!("{}*theta*r^{}", self.c, self.p)
    }

    fn value(&self, theta: f64, r: f64) -> f64 {
        self.c * theta * r.powf(self.p)
    }

    fn jet(&self, theta: f64, r: f64) -> PolarJet {
        let (c, p) = (self.c, self.p);
        let rp1 = r.powf(p - 1.0);
        PolarJet {
            f: c * theta * r.powf(p),
            f_t: c * r.powf(p),
            f_r: c * p * theta * rp1,
            f_tt: 0.0,
            f_rr: c * p * (p - 1.0) * theta * r.powf(p - 2.0),
            f_rt: c * p * rp1,
        }
    }
}

/// `G = j·x_{n+1}·w^q` with `w = √(x₁²+…+xₙ²)`.
#[derive(Debug, Clone, Copy)]
pub struct AltBarrierField {
    pub j: f64,
    pub q: f64,
}

impl ScalarField for AltBarrierField {
    fn label(&self) -> String {
        format!("{}*x_last*w^{}", self.j, self.q)
    }

    fn value(&self, x: &[f64]) -> f64 {
        let (last, rest) = x.split_last().expect("point has coordinates");
        let w = rest.iter().map(|v| v * v).sum::<f64>().sqrt();
        self.j * last * w.powf(self.q)
    }

    fn jet(&self, x: &[f64]) -> CartesianJet {
        let d = x.len();
        let top = d - 1;
        let xn = x[top];
        let w2: f64 = x[..top].iter().map(|v| v * v).sum();
        let w = w2.sqrt();
        let (j, q) = (self.j, self.q);
        let wq = w.powf(q);
        let wq2 = w.powf(q - 2.0);
        let wq4 = w.powf(q - 4.0);
        let mut grad = DVector::zeros(d);
        let mut hess = DMatrix::zeros(d, d);
        grad[top] = j * wq;
        for a in 0..top {
            grad[a] = j * xn * q * wq2 * x[a];
            hess[(a, top)] = j * q * wq2 * x[a];
            hess[(top, a)] = hess[(a, top)];
            for b in 0..top {
                let delta = if a == b { 1.0 } else { 0.0 };
                hess[(a, b)] = j * xn * q * ((q - 2.0) * wq4 * x[a] * x[b] + wq2 * delta);
            }
        }
        CartesianJet {
            value: j * xn * wq,
            grad,
            hess,
        }
    }
}

/// Tensor grid of `θ` values and radii.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierGrid {
    pub thetas: Vec<f64>,
    pub radii: Vec<f64>,
}

impl BarrierGrid {
    pub fn new(n_theta: usize, n_r: usize, r_min: f64, r_max: f64) -> Result<Self> {
        if n_theta < 2 || n_r < 1 {
            return Err(Error::param("grid", n_theta.min(n_r) as f64, "too few nodes"));
        }
        if !(r_min > 0.0 && r_max >= r_min) {
            return Err(Error::param(
                "r_min",
                r_min,
                "need 0 < r_min <= r_max; the origin is excluded",
            ));
        }
        let thetas = (0..n_theta)
            .map(|i| -1.0 + 2.0 * i as f64 / (n_theta - 1) as f64)
            .collect();
        Ok(Self {
            thetas,
            radii: log_grid(r_min, r_max, n_r),
        })
    }
}

impl Default for BarrierGrid {
    /// 201 values of `θ` on `[−1, 1]` and 200 radii log-spaced on `[10⁻², 10²]`.
    fn default() -> Self {
        Self::new(201, 200, 1e-2, 1e2).expect("default grid is valid")
    }
}

/// Relative zero tolerance for sign checks.
pub const SIGN_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierNode {
    pub theta: f64,
    pub r: f64,
    /// `θ·𝔏F` (or `x_{n+1}·𝔏G` scaled to `θ` for the alternate barrier).
    pub value: f64,
    /// `Ce^{−Φ}(p²−1)θ²r^{p−2}`.
    pub bound: f64,
    /// `max(C³e^{−2Φ}r^{3p−4}, Ce^{−Φ}r^{p−2})`.
    pub scale: f64,
}

impl BarrierNode {
    pub fn sign_ok(&self) -> bool {
        self.value >= -SIGN_TOL * self.scale
    }

    pub fn bound_ok(&self) -> bool {
        self.value - self.bound >= -SIGN_TOL * self.scale
    }
}

#[derive(Debug, Clone)]
pub struct BarrierReport {
    pub spec: BarrierSpec,
    pub nodes: Vec<BarrierNode>,
    /// Node minimizing `value/scale`.
    pub worst: BarrierNode,
    /// Node minimizing `(value − bound)/scale`.
    pub worst_bound: BarrierNode,
    pub sign_ok: bool,
    pub bound_ok: bool,
    pub alternate: Option<AlternateReport>,
}

#[derive(Debug, Clone)]
pub struct AlternateReport {
    pub nodes: Vec<BarrierNode>,
    pub worst: BarrierNode,
    pub sign_ok: bool,
}

impl BarrierReport {
    pub fn passed(&self) -> bool {
        self.sign_ok && self.bound_ok && self.alternate.as_ref().is_none_or(|a| a.sign_ok)
    }

    /// Columns `theta r value bound`, one header line.
    pub fn table(&self) -> String {
        let mut out = String::from("theta r value bound\n");
        for node in &self.nodes {
            out.push_str(&format!(
                "{:.11e} {:.11e} {:.11e} {:.11e}\n",
                node.theta, node.r, node.value, node.bound
            ));
        }
        out
    }

    pub fn summary(&self) -> String {
        let w = &self.worst;
        format!(
            "min theta*LF/scale = {:.11e} at (theta, r) = ({:.6}, {:.6e}); lower bound {}; sign {}",
            w.value / w.scale,
            w.theta,
            w.r,
            if self.bound_ok { "holds" } else { "violated" },
            if self.sign_ok { "ok" } else { "violated" },
        )
    }
}

fn min_by_ratio<F: Fn(&BarrierNode) -> f64>(nodes: &[BarrierNode], key: F) -> BarrierNode {
    *nodes
        .iter()
        .min_by(|a, b| key(a).total_cmp(&key(b)))
        .expect("grid is non-empty")
}

/// Checks `Φ′(r) ≥ −2(1−κ)/r` at the given radii.
pub fn check_conformal_hypothesis(metric: &ConformalRadialProfile, kappa: f64, radii: &[f64]) -> Result<()> {
    for &r in radii {
        let dphi = metric.dphi(r)?;
        let bound = -2.0 * (1.0 - kappa) / r;
        if dphi * r < bound * r - 1e-9 {
            return Err(Error::ConformalBoundViolated { r, dphi, bound });
        }
    }
    Ok(())
}

/// Evaluates `θ·𝔏(Cθr^p)` on the grid and checks it against `0` and against
/// `Ce^{−Φ}(p²−1)θ²r^{p−2}`. With `alternate`, also checks
/// `x_{n+1}·𝔏(C x_{n+1} w^{p−1}) ≥ 0` off the axis `|θ| = 1`.
pub fn barrier_check(
    metric: &ConformalRadialProfile,
    spec: &BarrierSpec,
    grid: &BarrierGrid,
    alternate: bool,
) -> Result<BarrierReport> {
    if metric.n() != spec.n {
        return Err(Error::Dimension {
            expected: spec.n,
            got: metric.n(),
        });
    }
    if spec.kappa > 1.0 {
        return Err(Error::KappaAboveOne { kappa: spec.kappa });
    }
    check_conformal_hypothesis(metric, spec.kappa, &grid.radii)?;
    let field = spec.field();
    let (c, p) = (spec.c, spec.p);
    let rows: Vec<Vec<BarrierNode>> = grid
        .radii
        .par_iter()
        .map(|&r| -> Result<Vec<BarrierNode>> {
            let phi = metric.phi(r)?;
            let e1 = (-phi).exp();
            let scale = (c.powi(3) * e1 * e1 * r.powf(3.0 * p - 4.0)).max(c * e1 * r.powf(p - 2.0));
            grid.thetas
                .iter()
                .map(|&theta| {
                    let (a, b) = l_polar_groups(metric, &field, theta, r)?;
                    Ok(BarrierNode {
                        theta,
                        r,
                        value: theta * (a + b),
                        bound: c * e1 * (p * p - 1.0) * theta * theta * r.powf(p - 2.0),
                        scale,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let nodes: Vec<BarrierNode> = rows.into_iter().flatten().collect();
    let worst = min_by_ratio(&nodes, |n| n.value / n.scale);
    let worst_bound = min_by_ratio(&nodes, |n| (n.value - n.bound) / n.scale);
    let alternate = if alternate {
        Some(alternate_check(metric, spec, grid)?)
    } else {
        None
    };
    Ok(BarrierReport {
        spec: *spec,
        sign_ok: nodes.iter().all(BarrierNode::sign_ok),
        bound_ok: nodes.iter().all(BarrierNode::bound_ok),
        nodes,
        worst,
        worst_bound,
        alternate,
    })
}

fn alternate_check(metric: &ConformalRadialProfile, spec: &BarrierSpec, grid: &BarrierGrid) -> Result<AlternateReport> {
    let field = AltBarrierField {
        j: spec.c,
        q: spec.p - 1.0,
    };
    let d = metric.n_ambient();
    let mut e = vec![0.0; d - 1];
    e[0] = 1.0;
    let (c, p) = (spec.c, spec.p);
    let rows: Vec<Vec<BarrierNode>> = grid
        .radii
        .par_iter()
        .map(|&r| -> Result<Vec<BarrierNode>> {
            let phi = metric.phi(r)?;
            let e1 = (-phi).exp();
            let scale = (c.powi(3) * e1 * e1 * r.powf(3.0 * p - 4.0)).max(c * e1 * r.powf(p - 2.0));
            grid.thetas
                .iter()
                .filter(|t| t.abs() < 1.0)
                .map(|&theta| {
                    let x = polar_point(theta, r, &e);
                    let (a, b) = l_conformal_groups(metric, &field, &x)?;
                    Ok(BarrierNode {
                        theta,
                        r,
                        value: theta * (a + b),
                        bound: 0.0,
                        scale,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let nodes: Vec<BarrierNode> = rows.into_iter().flatten().collect();
    let worst = min_by_ratio(&nodes, |n| n.value / n.scale);
    Ok(AlternateReport {
        sign_ok: nodes.iter().all(BarrierNode::sign_ok),
        nodes,
        worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial_metric::cone_conformal;

    #[test]
    fn exponent_examples() {
        assert!((barrier_exponent(7, 1.0).unwrap() - 1.0).abs() < 1e-15);
        let ks = threshold_kappa(3);
        assert!((barrier_exponent(3, ks).unwrap() - 2f64.sqrt()).abs() < 1e-7);
        assert!(matches!(barrier_exponent(7, 0.5), Err(Error::BelowThreshold { .. })));
        assert!(matches!(barrier_exponent(7, 1.1), Err(Error::KappaAboveOne { .. })));
    }

    #[test]
    fn flat_linear_barrier_vanishes() {
        let m = ConformalRadialProfile::flat(7).unwrap();
        let spec = BarrierSpec::new(7, 1.0, 1.0).unwrap();
        let grid = BarrierGrid::new(21, 10, 0.1, 10.0).unwrap();
        let report = barrier_check(&m, &spec, &grid, false).unwrap();
        assert!(report.passed());
        assert!(report.nodes.iter().all(|n| n.value.abs() < 1e-12 * n.scale));
    }

    #[test]
    fn cone_barrier_matches_reduced_expression_at_poles() {
        let (n, k, c) = (7usize, 0.8, 1.3);
        let m = cone_conformal(k, n).unwrap();
        let spec = BarrierSpec::new(n, k, c).unwrap();
        let p = spec.p;
        assert!((p - 1.443_5).abs() < 1e-4);
        for &r in &[0.1, 1.0, 7.0] {
            let (a, b) = l_polar_groups(&m, &spec.field(), 1.0, r).unwrap();
            let phi = m.phi(r).unwrap();
            let nf = n as f64;
            let want = c.powi(3) * (-2.0 * phi).exp() * nf * p * p * (k * p - 1.0) * r.powf(3.0 * p - 4.0)
                + c * (-phi).exp() * (p * p + (nf - 1.0) * k * p - nf) * r.powf(p - 2.0);
            assert!(((a + b) - want).abs() < 1e-12 * want.abs(), "{} vs {want}", a + b);
        }
    }

    #[test]
    fn hypothesis_violation_names_radius() {
        let m = cone_conformal(0.7, 7).unwrap();
        let spec = BarrierSpec::new(7, 0.8, 1.0).unwrap();
        let err = barrier_check(&m, &spec, &BarrierGrid::default(), false).unwrap_err();
        assert!(matches!(err, Error::ConformalBoundViolated { .. }));
    }
}
