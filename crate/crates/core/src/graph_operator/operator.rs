//! The operator `𝔏F = (1+|DF|²)^{3/2} div_Σ(DF/√(1+|DF|²))` on
//! `Σ = (R^{n+1}, e^{Φ(r)} Σ dxᵢ²)`, in three independent forms.

use super::fields::{ScalarField, ScalarFieldPolar};
use crate::error::{Error, Result};
use crate::numeric::Jet;
use crate::radial_metric::ConformalRadialProfile;

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn check_point(metric: &ConformalRadialProfile, x: &[f64]) -> Result<(f64, Jet)> {
    if x.len() != metric.n_ambient() {
        return Err(Error::Dimension {
            expected: metric.n_ambient(),
            got: x.len(),
        });
    }
    let r = norm(x);
    let jet = metric.jet(r)?;
    Ok((r, jet))
}

/// `Φ′(r)·xᵢ/r`, zero at the origin of a regular metric.
fn radial_factor(jet: &Jet, r: f64) -> f64 {
    if r == 0.0 {
        0.0
    } else {
        jet.d1 / r
    }
}

/// The `e^{−2Φ}` and `e^{−Φ}` groups of the Cartesian form, in that order.
pub fn l_conformal_groups(metric: &ConformalRadialProfile, field: &dyn ScalarField, x: &[f64]) -> Result<(f64, f64)> {
    let (r, phi) = check_point(metric, x)?;
    let n = metric.n() as f64;
    let j = field.jet(x);
    let g2 = j.grad.norm_squared();
    let lap = j.hess.trace();
    let hgg = j.grad.dot(&(&j.hess * &j.grad));
    let radial = radial_factor(&phi, r) * x.iter().zip(j.grad.iter()).map(|(a, b)| a * b).sum::<f64>();
    let e1 = (-phi.value).exp();
    let quad = e1 * e1 * (g2 * (lap + 0.5 * n * radial) - hgg);
    let lin = e1 * (lap + 0.5 * (n - 1.0) * radial);
    Ok((quad, lin))
}

/// Cartesian-conformal form:
/// `e^{−2Φ}(|∂F|²(ΔF + (n/2)Φ′Fᵢxᵢ/r) − F_{ij}FᵢFⱼ) + e^{−Φ}(ΔF + ((n−1)/2)Φ′Fᵢxᵢ/r)`.
pub fn l_conformal(metric: &ConformalRadialProfile, field: &dyn ScalarField, x: &[f64]) -> Result<f64> {
    let (a, b) = l_conformal_groups(metric, field, x)?;
    Ok(a + b)
}

/// The `e^{−2Φ}` and `e^{−Φ}` groups of the polar form.
pub fn l_polar_groups(
    metric: &ConformalRadialProfile,
    field: &dyn ScalarFieldPolar,
    theta: f64,
    r: f64,
) -> Result<(f64, f64)> {
    if !(-1.0..=1.0).contains(&theta) {
        return Err(Error::param("theta", theta, "must lie in [-1, 1]"));
    }
    if !(r > 0.0) {
        return Err(Error::param("r", r, "polar form needs r > 0"));
    }
    let phi = metric.jet(r)?;
    let n = metric.n() as f64;
    let p = field.jet(theta, r);
    let s = 1.0 - theta * theta;
    let r2 = r * r;
    let grad2 = s * p.f_t * p.f_t / r2 + p.f_r * p.f_r;
    let quad = n * grad2 * (p.f_r / r + 0.5 * phi.d1 * p.f_r - theta * p.f_t / r2)
        + s * p.f_t * p.f_t / r2 * (theta * p.f_t / r2 + p.f_r / r)
        + s / r2 * (p.f_t * p.f_t * p.f_rr + p.f_r * p.f_r * p.f_tt - 2.0 * p.f_t * p.f_r * p.f_rt);
    let lin = p.f_rr + s / r2 * p.f_tt + n / r * p.f_r - n * theta / r2 * p.f_t + 0.5 * (n - 1.0) * phi.d1 * p.f_r;
    let e1 = (-phi.value).exp();
    Ok((e1 * e1 * quad, e1 * lin))
}

/// Polar form of `𝔏` for `F = F(θ, r)`.
pub fn l_polar(metric: &ConformalRadialProfile, field: &dyn ScalarFieldPolar, theta: f64, r: f64) -> Result<f64> {
    let (a, b) = l_polar_groups(metric, field, theta, r)?;
    Ok(a + b)
}

/// Divergence form by central differences of the flux
/// `e^{(n−1)Φ/2} ∂F/√(1+e^{−Φ}|∂F|²)`, using only values of `F` and `Φ`.
pub fn l_fd_oracle(metric: &ConformalRadialProfile, field: &dyn ScalarField, x: &[f64], h: f64) -> Result<f64> {
    let (_, phi0) = check_point(metric, x)?;
    if norm(x) <= 2.0 * h * (x.len() as f64).sqrt() && !metric.regular_at_origin() {
        return Err(Error::param("h", h, "stencil reaches the singular origin"));
    }
    let n = metric.n() as f64;
    let d = x.len();
    let grad = |y: &mut Vec<f64>| -> Vec<f64> {
        (0..d)
            .map(|i| {
                y[i] += h;
                let fp = field.value(y);
                y[i] -= 2.0 * h;
                let fm = field.value(y);
                y[i] += h;
                (fp - fm) / (2.0 * h)
            })
            .collect()
    };
    let mut y = x.to_vec();
    let mut div = 0.0;
    for j in 0..d {
        let mut flux = |offset: f64| -> Result<f64> {
            y[j] += offset;
            let phi = metric.phi(norm(&y))?;
            let g = grad(&mut y);
            y[j] -= offset;
            let g2: f64 = g.iter().map(|v| v * v).sum();
            Ok((0.5 * (n - 1.0) * phi).exp() * g[j] / (1.0 + (-phi).exp() * g2).sqrt())
        };
        div += (flux(h)? - flux(-h)?) / (2.0 * h);
    }
    div *= (-0.5 * (n + 1.0) * phi0.value).exp();
    let g0 = grad(&mut y);
    let g2: f64 = g0.iter().map(|v| v * v).sum();
    let v2 = 1.0 + (-phi0.value).exp() * g2;
    Ok(v2 * v2.sqrt() * div)
}

/// Mean curvature `div_Σ(Du/√(1+|Du|²))` of the graph of `u` over `Σ`,
/// computed from covariant Hessians with the conformal Christoffel symbols
/// `Γᵏᵢⱼ = (Φ′/2)(δᵢₖxⱼ/r + δⱼₖxᵢ/r − δᵢⱼxₖ/r)`.
pub fn mean_curvature_graph(metric: &ConformalRadialProfile, u: &dyn ScalarField, x: &[f64]) -> Result<f64> {
    let (r, phi) = check_point(metric, x)?;
    let d = x.len();
    let j = u.jet(x);
    let half = 0.5 * radial_factor(&phi, r);
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let e1 = (-phi.value).exp();
    let du2 = e1 * j.grad.norm_squared();
    let v = (1.0 + du2).sqrt();
    let mut trace = 0.0;
    let mut along = 0.0;
    for i in 0..d {
        for jj in 0..d {
            let mut cov = j.hess[(i, jj)];
            for k in 0..d {
                let gamma = half * (delta(i, k) * x[jj] + delta(jj, k) * x[i] - delta(i, jj) * x[k]);
                cov -= gamma * j.grad[k];
            }
            if i == jj {
                trace += cov;
            }
            along += j.grad[i] * j.grad[jj] * cov;
        }
    }
    Ok((e1 * trace - e1 * e1 * along / (v * v)) / v)
}

/// `(1+|DF|²)^{3/2}` with `|DF|² = e^{−Φ}|∂F|²`.
pub fn graph_factor(metric: &ConformalRadialProfile, field: &dyn ScalarField, x: &[f64]) -> Result<f64> {
    let (_, phi) = check_point(metric, x)?;
    let g2 = field.jet(x).grad.norm_squared();
    Ok((1.0 + (-phi.value).exp() * g2).powf(1.5))
}
