//! Equivariant area minimization: radial graphs `x_{n+1} = u(|x'|)` over the
//! hyperplane `T = {x_{n+1} = 0}` in `e^{Φ(r)} Σ dxᵢ²`, with `u(W) = 0`.
//!
//! The area (link volume `ω_{n−1}` omitted) is
//! `A(u) = ∫₀^W e^{nΦ(r)/2} √(1+u′²) w^{n−1} dw` with `r = √(w² + u²)`.
//! Each cell contributes `e^{nΦ(r_mid)/2} √(1+s²) ∫_cell w^{n−1}` where `s` is
//! the cell slope and `r_mid` uses the mean height.

mod descent;
mod scan;

pub use descent::{minimize, seed_profile, MinimizationResult, MinimizeOptions, TracePoint, Verdict};
pub use scan::{threshold_scan, threshold_scan_with, ScanRow, ScanSetup, ScanTable};

use crate::error::{Error, Result};
use crate::radial_metric::ConformalRadialProfile;

/// Node layout on `[0, W]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridKind {
    /// `w_i = iW/(m−1)`.
    Uniform,
    /// `w₀ = 0`, then geometric from `w₁ = axis_ratio·W` to `W`.
    Geometric { axis_ratio: f64 },
}

impl GridKind {
    /// Geometric grid with `w₁ = 10⁻⁸ W`.
    pub const DEFAULT: GridKind = GridKind::Geometric { axis_ratio: 1e-8 };

    pub fn nodes(self, w_outer: f64, size: usize) -> Result<Vec<f64>> {
        if size < 4 {
            return Err(Error::param("grid_size", size as f64, "need at least 4 nodes"));
        }
        if !(w_outer > 0.0) {
            return Err(Error::param("W", w_outer, "must be positive"));
        }
        let last = size - 1;
        Ok(match self {
            GridKind::Uniform => (0..size).map(|i| w_outer * i as f64 / last as f64).collect(),
            GridKind::Geometric { axis_ratio } => {
                if !(axis_ratio > 0.0 && axis_ratio < 1.0) {
                    return Err(Error::param("axis_ratio", axis_ratio, "must lie in (0, 1)"));
                }
                let mut v = vec![0.0];
                let steps = (last - 1) as f64;
                v.extend((1..=last).map(|i| {
                    if i == last {
                        w_outer
                    } else {
                        w_outer * axis_ratio.powf((last - i) as f64 / steps)
                    }
                }));
                v
            }
        })
    }
}

/// Discretized equivariant area functional.
#[derive(Debug, Clone)]
pub struct EquivariantAreaProblem {
    metric: ConformalRadialProfile,
    n: usize,
    w_outer: f64,
    grid: Vec<f64>,
    /// `∫_cell w^{n−1} dw`.
    cell_weight: Vec<f64>,
    cell_mid: Vec<f64>,
}

impl EquivariantAreaProblem {
    pub fn new(metric: ConformalRadialProfile, w_outer: f64, grid_size: usize, kind: GridKind) -> Result<Self> {
        let grid = kind.nodes(w_outer, grid_size)?;
        Self::with_grid(metric, grid)
    }

    pub fn with_grid(metric: ConformalRadialProfile, grid: Vec<f64>) -> Result<Self> {
        if grid.len() < 4 {
            return Err(Error::param("grid_size", grid.len() as f64, "need at least 4 nodes"));
        }
        if grid[0] != 0.0 {
            return Err(Error::param("w0", grid[0], "grid must start on the axis"));
        }
        for w in grid.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::param("w", w[1], "grid must increase strictly"));
            }
        }
        let n = metric.n();
        let nf = n as f64;
        let cell_weight = grid.windows(2).map(|w| (w[1].powf(nf) - w[0].powf(nf)) / nf).collect();
        // centroid of the weight w^{n−1} on each cell
        let cell_mid = grid
            .windows(2)
            .map(|w| nf / (nf + 1.0) * (w[1].powf(nf + 1.0) - w[0].powf(nf + 1.0)) / (w[1].powf(nf) - w[0].powf(nf)))
            .collect();
        Ok(Self {
            w_outer: *grid.last().expect("non-empty grid"),
            metric,
            n,
            grid,
            cell_weight,
            cell_mid,
        })
    }

    pub fn metric(&self) -> &ConformalRadialProfile {
        &self.metric
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn w_outer(&self) -> f64 {
        self.w_outer
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn zero(&self) -> Vec<f64> {
        vec![0.0; self.grid.len()]
    }

    /// Imposes `u(W) = 0` and the axis condition `u₀ = u₁`.
    pub fn project(&self, u: &mut [f64]) {
        let last = u.len() - 1;
        u[last] = 0.0;
        u[0] = u[1];
    }

    /// Checks the boundary and axis conditions of a candidate profile.
    pub fn check_profile(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.grid.len() {
            return Err(Error::Dimension {
                expected: self.grid.len(),
                got: u.len(),
            });
        }
        let last = u[u.len() - 1];
        if last != 0.0 {
            return Err(Error::NonzeroBoundary {
                rho: self.w_outer,
                value: last,
            });
        }
        if u[0] != u[1] {
            return Err(Error::param("u0", u[0], "axis condition needs u(w0) = u(w1)"));
        }
        Ok(())
    }

    fn cell_terms(&self, u: &[f64], i: usize) -> Result<(f64, f64, f64, f64)> {
        let dw = self.grid[i + 1] - self.grid[i];
        let s = (u[i + 1] - u[i]) / dw;
        let um = 0.5 * (u[i] + u[i + 1]);
        let wm = self.cell_mid[i];
        let r = wm.hypot(um);
        let jet = self.metric.jet(r)?;
        let e = (0.5 * self.n as f64 * jet.value).exp();
        Ok((e, s, um / r * jet.d1, dw))
    }

    /// `A(u)`.
    pub fn area(&self, u: &[f64]) -> Result<f64> {
        let mut total = 0.0;
        for i in 0..self.cell_weight.len() {
            let (e, s, _, _) = self.cell_terms(u, i)?;
            let v = self.cell_weight[i] * e * (1.0 + s * s).sqrt();
            if !v.is_finite() {
                return Err(Error::IntegrationFailure {
                    r: self.cell_mid[i],
                    reason: "area integrand diverges".into(),
                });
            }
            total += v;
        }
        Ok(total)
    }

    /// `∂A/∂uᵢ` with the axis tie folded into `u₁` and zero at the fixed ends.
    pub fn gradient(&self, u: &[f64]) -> Result<Vec<f64>> {
        let m = self.grid.len();
        let mut g = vec![0.0; m];
        let half_n = 0.5 * self.n as f64;
        for i in 0..m - 1 {
            let (e, s, dphi_u, dw) = self.cell_terms(u, i)?;
            let root = (1.0 + s * s).sqrt();
            let c = self.cell_weight[i] * e;
            // d/du of e^{nΦ/2}: (n/2)Φ′ ∂r/∂u_mid, each node carries half
            let height = c * half_n * dphi_u * root * 0.5;
            let slope = c * s / root / dw;
            g[i] += height - slope;
            g[i + 1] += height + slope;
        }
        g[1] += g[0];
        g[0] = 0.0;
        g[m - 1] = 0.0;
        Ok(g)
    }

    /// `(A(tφ) + A(−tφ) − 2A(0))/t²` for a perturbation with `φ(W) = 0`.
    pub fn second_variation_fd(&self, phi: &[f64], t: f64) -> Result<f64> {
        if phi.len() != self.grid.len() {
            return Err(Error::Dimension {
                expected: self.grid.len(),
                got: phi.len(),
            });
        }
        if phi[phi.len() - 1] != 0.0 {
            return Err(Error::NonzeroBoundary {
                rho: self.w_outer,
                value: phi[phi.len() - 1],
            });
        }
        let scaled = |sign: f64| -> Vec<f64> { phi.iter().map(|p| sign * t * p).collect() };
        let a0 = self.area(&self.zero())?;
        let ap = self.area(&scaled(1.0))?;
        let am = self.area(&scaled(-1.0))?;
        let value = (ap + am - 2.0 * a0) / (t * t);
        if value.abs() < 1e-12 * a0 / (t * t) {
            return Err(Error::Cancellation(format!(
                "second difference {value:e} is below roundoff of A(0) = {a0:e}; use a larger t than {t}"
            )));
        }
        Ok(value)
    }
}

/// `A(u)` for a profile on the problem's grid.
pub fn area_of_graph(problem: &EquivariantAreaProblem, u: &[f64]) -> Result<f64> {
    if u.len() != problem.len() {
        return Err(Error::Dimension {
            expected: problem.len(),
            got: u.len(),
        });
    }
    problem.area(u)
}

pub fn second_variation_fd(problem: &EquivariantAreaProblem, phi: &[f64], t: f64) -> Result<f64> {
    problem.second_variation_fd(phi, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial_metric::cone_conformal;

    #[test]
    fn flat_disc_area() {
        let p =
            EquivariantAreaProblem::new(ConformalRadialProfile::flat(4).unwrap(), 2.0, 64, GridKind::DEFAULT).unwrap();
        let a = area_of_graph(&p, &p.zero()).unwrap();
        assert!((a - 16.0 / 4.0).abs() < 1e-13);
    }

    #[test]
    fn cone_disc_area() {
        let (k, n, w) = (0.8, 4usize, 1.5);
        let p = EquivariantAreaProblem::new(cone_conformal(k, n).unwrap(), w, 2048, GridKind::DEFAULT).unwrap();
        let a = p.area(&p.zero()).unwrap();
        let want = k.powi(n as i32 - 1) * w.powf(n as f64 * k) / n as f64;
        assert!(((a - want) / want).abs() < 1e-5, "{a} vs {want}");
    }

    #[test]
    fn gradient_matches_differences() {
        let p = EquivariantAreaProblem::new(
            cone_conformal(0.85, 4).unwrap(),
            1.0,
            40,
            GridKind::Geometric { axis_ratio: 1e-3 },
        )
        .unwrap();
        let mut u: Vec<f64> = p.grid().iter().map(|w| 0.1 * (1.0 - w * w) * (3.0 * w).cos()).collect();
        p.project(&mut u);
        let g = p.gradient(&u).unwrap();
        for i in 1..p.len() - 1 {
            let h = 1e-6;
            let mut up = u.clone();
            let mut um = u.clone();
            up[i] += h;
            um[i] -= h;
            p.project(&mut up);
            p.project(&mut um);
            let fd = (p.area(&up).unwrap() - p.area(&um).unwrap()) / (2.0 * h);
            assert!(
                (fd - g[i]).abs() < 1e-8 * (1.0 + g[i].abs()),
                "node {i}: {fd} vs {}",
                g[i]
            );
        }
    }

    #[test]
    fn bump_costs_area_above_threshold() {
        let p = EquivariantAreaProblem::new(cone_conformal(0.9, 4).unwrap(), 1.0, 256, GridKind::DEFAULT).unwrap();
        let mut u: Vec<f64> = p.grid().iter().map(|w| 0.05 * (1.0 - w * w).powi(2)).collect();
        p.project(&mut u);
        assert!(p.area(&u).unwrap() > p.area(&p.zero()).unwrap());
    }
}
