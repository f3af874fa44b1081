//! Preconditioned gradient descent with Armijo backtracking.
//!
//! The search direction solves `P d = −∇A` where `P` is the weighted slope
//! stiffness of `A` with lagged diffusivity `1/√(1+u′²)`. On a geometric grid
//! the plain gradient is badly scaled across cells, and this metric restores
//! a usable step length.

use super::EquivariantAreaProblem;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    FlatIsMin,
    CompetitorBeatsFlat,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            // evidence within the equivariant graph class only
            Verdict::FlatIsMin => "flat minimizes among equivariant graphs",
            Verdict::CompetitorBeatsFlat => "competitor beats flat",
        }
    }

    pub fn short(self) -> &'static str {
        match self {
            Verdict::FlatIsMin => "FlatIsMin",
            Verdict::CompetitorBeatsFlat => "CompetitorBeatsFlat",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub iteration: usize,
    pub area: f64,
    pub grad_sup: f64,
    pub step: f64,
}

#[derive(Debug, Clone)]
pub struct MinimizationResult {
    pub area_min: f64,
    pub area_flat: f64,
    pub u_star: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub verdict: Verdict,
    pub trace: Vec<TracePoint>,
}

impl MinimizationResult {
    /// `area_flat − area_min`, positive when a competitor wins.
    pub fn gap(&self) -> f64 {
        self.area_flat - self.area_min
    }

    pub fn sup_norm(&self) -> f64 {
        self.u_star.iter().fold(0.0, |a, v| a.max(v.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizeOptions {
    pub max_iter: usize,
    /// Converged when `sup|∇A| < grad_tol·(1 + |A|)` at exit.
    pub grad_tol: f64,
    /// Descent keeps going until `sup|∇A| < stop_tol·(1 + |A|)`
    /// and the preconditioned step is below `stop_step·W`, the line search
    /// stalls, or `max_iter` is hit. Gains below `κ*` are exponentially small
    /// near the threshold and only show up well past `grad_tol`.
    pub stop_tol: f64,
    pub stop_step: f64,
    pub armijo: f64,
    /// `CompetitorBeatsFlat` iff `area_min < area_flat·(1 − verdict_tol)`.
    pub verdict_tol: f64,
    /// Record every `trace_every`-th iteration.
    pub trace_every: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            max_iter: 20_000,
            grad_tol: 1e-8,
            stop_tol: 1e-13,
            stop_step: 1e-9,
            armijo: 1e-4,
            verdict_tol: 1e-12,
            trace_every: 10,
        }
    }
}

struct Preconditioner {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl Preconditioner {
    /// Assembled on the free nodes `1..m−1` (node 0 is tied to node 1).
    /// Slope stiffness uses the lagged diffusivity `1/√(1+s²)` at `u`, so
    /// steep needles near the axis still get a full-size step.
    fn at(problem: &EquivariantAreaProblem, u: &[f64]) -> Result<Self> {
        let m = problem.len();
        let mut diag = vec![0.0; m];
        let mut off = vec![0.0; m];
        for i in 0..m - 1 {
            let (e, s, _, dw) = problem.cell_terms(u, i)?;
            let c = problem.cell_weight[i] * e;
            let k = c / ((1.0 + s * s).sqrt() * dw * dw);
            let (a, b) = (i.max(1), i + 1);
            if a != b {
                diag[a] += k;
                diag[b] += k;
                off[a] -= k;
            }
        }
        Ok(Self {
            diag: diag[1..m - 1].to_vec(),
            off: off[1..m - 2].to_vec(),
        })
    }

    /// Thomas algorithm for `P x = rhs`.
    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        c[0] = if n > 1 { self.off[0] / self.diag[0] } else { 0.0 };
        d[0] = rhs[0] / self.diag[0];
        for i in 1..n {
            let denom = self.diag[i] - self.off[i - 1] * c[i - 1];
            if i < n - 1 {
                c[i] = self.off[i] / denom;
            }
            d[i] = (rhs[i] - self.off[i - 1] * d[i - 1]) / denom;
        }
        for i in (0..n - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        d
    }
}

/// Seed along the unstable mode:
/// `a·g/√(1+g²)` with `g = (w/W)^{(2−n)/2} sin(π log(w/w₁)/log(W/w₁))`,
/// zero on `[0, w₁]`.
pub fn seed_profile(problem: &EquivariantAreaProblem, amplitude: f64) -> Vec<f64> {
    let grid = problem.grid();
    let w_outer = problem.w_outer();
    let w1 = grid[1];
    let beta = (2.0 - problem.n() as f64) / 2.0;
    let span = (w_outer / w1).ln();
    let mut u: Vec<f64> = grid
        .iter()
        .map(|&w| {
            if w <= w1 {
                return 0.0;
            }
            let g = (w / w_outer).powf(beta) * (std::f64::consts::PI * (w / w1).ln() / span).sin();
            amplitude * g / (1.0 + g * g).sqrt()
        })
        .collect();
    problem.project(&mut u);
    u
}

pub fn minimize(problem: &EquivariantAreaProblem, init: &[f64], opts: MinimizeOptions) -> Result<MinimizationResult> {
    problem.check_profile(init)?;
    if !(opts.armijo > 0.0 && opts.armijo < 0.5) {
        return Err(Error::param("armijo", opts.armijo, "must lie in (0, 0.5)"));
    }
    let m = problem.len();
    let w_outer = problem.w_outer();
    let area_flat = problem.area(&problem.zero())?;
    let mut u = init.to_vec();
    let mut area = problem.area(&u)?;
    let mut trace = Vec::new();
    let mut step = 1.0;
    let mut iterations = 0;
    for it in 0..opts.max_iter {
        iterations = it;
        let g = problem.gradient(&u)?;
        let sup = g.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if opts.trace_every > 0 && it.is_multiple_of(opts.trace_every) {
            trace.push(TracePoint {
                iteration: it,
                area,
                grad_sup: sup,
                step,
            });
        }
        let free = Preconditioner::at(problem, &u)?.solve(&g[1..m - 1]);
        let mut dir = vec![0.0; m];
        for (i, v) in free.iter().enumerate() {
            dir[i + 1] = -v;
        }
        dir[0] = dir[1];
        let reach = dir.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        // needles at the axis carry almost no gradient but a large step
        if sup < opts.stop_tol * (1.0 + area.abs()) && reach < opts.stop_step * w_outer {
            break;
        }
        let slope: f64 = g.iter().zip(&dir).map(|(a, b)| a * b).sum();
        if !(slope < 0.0) {
            break;
        }
        step = (2.0 * step).min(1.0);
        let mut accepted = false;
        while step > 1e-16 {
            let trial: Vec<f64> = u.iter().zip(&dir).map(|(a, b)| a + step * b).collect();
            let a_trial = problem.area(&trial)?;
            if a_trial <= area + opts.armijo * step * slope {
                u = trial;
                area = a_trial;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        iterations = it + 1;
    }
    let g = problem.gradient(&u)?;
    let sup = g.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let converged = sup < opts.grad_tol * (1.0 + area.abs());
    if trace.last().map(|t| t.iteration) != Some(iterations) {
        trace.push(TracePoint {
            iteration: iterations,
            area,
            grad_sup: sup,
            step,
        });
    }
    let verdict = if area < area_flat - opts.verdict_tol * area_flat {
        Verdict::CompetitorBeatsFlat
    } else {
        Verdict::FlatIsMin
    };
    Ok(MinimizationResult {
        area_min: area,
        area_flat,
        u_star: u,
        converged,
        iterations,
        verdict,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::area_min::GridKind;
    use crate::radial_metric::{cone_conformal, ConformalRadialProfile};

    fn bump(problem: &EquivariantAreaProblem, height: f64) -> Vec<f64> {
        let w_outer = problem.w_outer();
        let mut u: Vec<f64> = problem
            .grid()
            .iter()
            .map(|&w| height * (1.0 - (w / w_outer).powi(2)).powi(2))
            .collect();
        problem.project(&mut u);
        u
    }

    #[test]
    fn flat_space_returns_to_the_plane() {
        let p =
            EquivariantAreaProblem::new(ConformalRadialProfile::flat(4).unwrap(), 1.0, 128, GridKind::DEFAULT).unwrap();
        let r = minimize(&p, &bump(&p, 0.1), MinimizeOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::FlatIsMin);
        assert!(r.converged);
        assert!(r.sup_norm() < 1e-4, "{}", r.sup_norm());
    }

    #[test]
    fn stable_cone_flattens_a_small_bump() {
        let p = EquivariantAreaProblem::new(cone_conformal(0.95, 4).unwrap(), 1.0, 256, GridKind::DEFAULT).unwrap();
        let r = minimize(&p, &bump(&p, 0.02), MinimizeOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::FlatIsMin);
        assert!(r.sup_norm() < 1e-4, "{}", r.sup_norm());
        assert!(r.area_min <= r.area_flat * (1.0 + 1e-12));
    }

    #[test]
    fn unstable_cone_is_beaten_from_the_mode_seed() {
        let p = EquivariantAreaProblem::new(cone_conformal(0.75, 4).unwrap(), 1.0, 256, GridKind::DEFAULT).unwrap();
        let seed = seed_profile(&p, 0.05);
        let r = minimize(&p, &seed, MinimizeOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::CompetitorBeatsFlat);
        assert!(r.area_min < r.area_flat * (1.0 - 1e-6));
        assert!(r.converged);
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let p = EquivariantAreaProblem::new(cone_conformal(0.75, 4).unwrap(), 1.0, 128, GridKind::DEFAULT).unwrap();
        let opts = MinimizeOptions {
            max_iter: 3,
            ..Default::default()
        };
        let r = minimize(&p, &seed_profile(&p, 0.05), opts).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 3);
        assert!(!r.trace.is_empty());
    }

    #[test]
    fn thomas_solve_inverts_the_preconditioner() {
        let p = EquivariantAreaProblem::new(cone_conformal(0.8, 5).unwrap(), 1.0, 32, GridKind::DEFAULT).unwrap();
        let pre = Preconditioner::at(&p, &seed_profile(&p, 0.05)).unwrap();
        let x: Vec<f64> = (0..pre.diag.len()).map(|i| (i as f64 * 0.7).sin()).collect();
        let mut b = vec![0.0; x.len()];
        for i in 0..x.len() {
            b[i] = pre.diag[i] * x[i];
            if i > 0 {
                b[i] += pre.off[i - 1] * x[i - 1];
            }
            if i + 1 < x.len() {
                b[i] += pre.off[i] * x[i + 1];
            }
        }
        let y = pre.solve(&b);
        for (a, c) in x.iter().zip(&y) {
            assert!((a - c).abs() < 1e-9, "{a} vs {c}");
        }
    }
}
