//! Ritz minimization of `I(φ,φ)/‖φ‖²` over hat functions in `s = log ρ`.

use nalgebra::{DMatrix, SymmetricEigen};

use super::ConeStabilityProblem;
use crate::error::{Error, Result};

/// Four-point Gauss–Legendre nodes and weights on `[−1, 1]`.
const GL4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
];

/// Smallest generalized Rayleigh quotient over `basis_size` interior hat
/// functions on a uniform grid in `s ∈ [log ε, 0]`.
///
/// In `s` the form reads `∫(φ_s² + cφ²)e^{(n−2)s} ds` and the norm
/// `∫φ²e^{(n−2)s} ds`.
pub fn rayleigh_min(problem: &ConeStabilityProblem, basis_size: usize) -> Result<f64> {
    if basis_size < 8 {
        return Err(Error::param("basis_size", basis_size as f64, "need at least 8 modes"));
    }
    let m = basis_size;
    let lo = problem.epsilon.ln();
    let h = -lo / (m + 1) as f64;
    let beta = problem.n as f64 - 2.0;
    let c = problem.potential();
    let mut stiff = DMatrix::<f64>::zeros(m, m);
    let mut mass = DMatrix::<f64>::zeros(m, m);
    // element e spans nodes e and e+1 of the full grid (0 and m+1 are fixed)
    for e in 0..=m {
        let s0 = lo + e as f64 * h;
        let mut kk = [[0.0; 2]; 2];
        let mut mm = [[0.0; 2]; 2];
        for &(xi, wq) in &GL4 {
            let t = 0.5 * (xi + 1.0);
            let w = wq * 0.5 * h * (beta * (s0 + t * h)).exp();
            let shape = [1.0 - t, t];
            let slope = [-1.0 / h, 1.0 / h];
            for a in 0..2 {
                for b in 0..2 {
                    kk[a][b] += w * slope[a] * slope[b];
                    mm[a][b] += w * shape[a] * shape[b];
                }
            }
        }
        for a in 0..2 {
            for b in 0..2 {
                let (ga, gb) = (e + a, e + b);
                if ga == 0 || gb == 0 || ga == m + 1 || gb == m + 1 {
                    continue;
                }
                stiff[(ga - 1, gb - 1)] += kk[a][b] + c * mm[a][b];
                mass[(ga - 1, gb - 1)] += mm[a][b];
            }
        }
    }
    let chol = mass
        .cholesky()
        .ok_or_else(|| Error::Eigen("mass matrix is not positive definite".into()))?;
    let l_inv = chol
        .l()
        .try_inverse()
        .ok_or_else(|| Error::Eigen("singular Cholesky factor".into()))?;
    let reduced: DMatrix<f64> = &l_inv * stiff * l_inv.transpose();
    let sym = (&reduced + reduced.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    eig.eigenvalues
        .iter()
        .copied()
        .min_by(f64::total_cmp)
        .ok_or_else(|| Error::Eigen("empty spectrum".into()))
}
