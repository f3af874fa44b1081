//! Limits at infinity from a geometric radius ladder `ρ = 2^k`.
//!
//! Samples are assumed to expand as `L + a₁/ρ + a₂/ρ² + …`; each Richardson
//! column removes one power.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LimitEstimate {
    pub value: f64,
    /// Difference between the last two extrapolants, floored at a few ulps.
    pub uncertainty: f64,
    pub samples: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy)]
pub struct LadderOptions {
    pub k_min: i32,
    pub k_max: i32,
    pub max_columns: usize,
    pub rel_tol: f64,
}

impl Default for LadderOptions {
    fn default() -> Self {
        Self {
            k_min: 2,
            k_max: 20,
            max_columns: 4,
            rel_tol: 1e-6,
        }
    }
}

/// Extrapolates `f(ρ)` as `ρ → ∞` along `ρ = 2^k`.
pub fn limit_at_infinity<F>(f: F, opts: LadderOptions) -> Result<LimitEstimate>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut samples = Vec::new();
    let mut prev_row: Vec<f64> = Vec::new();
    let mut prev_best: Option<f64> = None;
    let mut accepted: Option<(f64, f64)> = None;
    for k in opts.k_min..=opts.k_max {
        let rho = 2f64.powi(k);
        let v = f(rho)?;
        samples.push((rho, v));
        let mut row = vec![v];
        for j in 1..=prev_row.len().min(opts.max_columns) {
            let factor = 2f64.powi(j as i32) - 1.0;
            let t = row[j - 1] + (row[j - 1] - prev_row[j - 1]) / factor;
            row.push(t);
        }
        let best = *row.last().expect("row is non-empty");
        if let Some(pb) = prev_best {
            let diff = (best - pb).abs();
            let converged = row.len() > opts.max_columns.min(2) && diff <= opts.rel_tol * best.abs().max(1e-300);
            match accepted {
                // keep climbing the ladder while the extrapolants keep tightening
                Some((_, d)) if diff >= d => break,
                Some(_) => accepted = Some((best, diff)),
                None if converged => accepted = Some((best, diff)),
                None => {}
            }
        }
        prev_best = Some(best);
        prev_row = row;
    }
    if let Some((value, diff)) = accepted {
        let floor = 64.0 * f64::EPSILON * value.abs();
        return Ok(LimitEstimate {
            value,
            uncertainty: diff.max(floor),
            samples,
        });
    }
    Err(Error::LimitNotConverged { samples })
}
