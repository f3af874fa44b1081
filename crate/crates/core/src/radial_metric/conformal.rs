//! Conformally flat radial metrics `e^{Φ(r)} Σ dxᵢ²` and the conversion from
//! warped products.
//!
//! With `ρ = ψ(r)` and `rψ′ = λ(ψ)`, the warped metric becomes
//! `(λ(ψ)/r)² (dr² + r² dθ²)`, so `Φ = 2 log(λ(ψ(r))/r)`. The ODE integrates
//! in closed form, `∫ dρ/λ = log r + const`, which is inverted with Newton in
//! `log x` for a chart variable `x`.

use std::fmt;
use std::sync::Arc;

use super::{check_kappa_half_open, ConeExponent, RadialGraph, WarpedProfile};
use crate::error::{Error, Result};
use crate::numeric::quad::{gk15, integrate, QuadOptions};
use crate::numeric::roots::solve_monotone;
use crate::numeric::Jet;

/// Radial conformal exponent `Φ(r)`.
pub trait ConformalExponent: fmt::Debug + Send + Sync {
    fn kind(&self) -> &'static str;

    /// `Φ, Φ′, Φ″` at `r`.
    fn jet(&self, r: f64) -> Result<Jet>;

    /// True when `Φ` extends smoothly to `r = 0`.
    fn regular_at_origin(&self) -> bool;

    /// The warped radius `ψ(r)` when the exponent came from a warped profile.
    fn warped_radius(&self, _r: f64) -> Option<Result<f64>> {
        None
    }
}

/// A metric `e^{Φ(r)} Σ dxᵢ²` on `R^{n+1}`.
#[derive(Clone)]
pub struct ConformalRadialProfile {
    n: usize,
    kappa_hint: Option<f64>,
    exponent: Arc<dyn ConformalExponent>,
}

impl fmt::Debug for ConformalRadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConformalRadialProfile")
            .field("n", &self.n)
            .field("kappa_hint", &self.kappa_hint)
            .field("exponent", &self.exponent)
            .finish()
    }
}

impl ConformalRadialProfile {
    pub fn new(n: usize, kappa_hint: Option<f64>, exponent: Arc<dyn ConformalExponent>) -> Result<Self> {
        if n < 2 {
            return Err(Error::param("n", n as f64, "ambient dimension n+1 must be at least 3"));
        }
        if let Some(k) = kappa_hint {
            check_kappa_half_open(k)?;
        }
        Ok(Self {
            n,
            kappa_hint,
            exponent,
        })
    }

    /// Euclidean space, `Φ ≡ 0`.
    pub fn flat(n: usize) -> Result<Self> {
        Self::new(n, Some(1.0), Arc::new(ConeExponent { kappa: 1.0 }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_ambient(&self) -> usize {
        self.n + 1
    }

    pub fn kappa_hint(&self) -> Option<f64> {
        self.kappa_hint
    }

    pub fn kind(&self) -> &'static str {
        self.exponent.kind()
    }

    pub fn exponent(&self) -> &Arc<dyn ConformalExponent> {
        &self.exponent
    }

    pub fn regular_at_origin(&self) -> bool {
        self.exponent.regular_at_origin()
    }

    pub fn jet(&self, r: f64) -> Result<Jet> {
        if r.is_nan() || r < 0.0 {
            return Err(Error::param("r", r, "radius must be non-negative"));
        }
        if r == 0.0 && !self.exponent.regular_at_origin() {
            return Err(Error::PoleEvaluation { r });
        }
        self.exponent.jet(r)
    }

    pub fn phi(&self, r: f64) -> Result<f64> {
        Ok(self.jet(r)?.value)
    }

    pub fn dphi(&self, r: f64) -> Result<f64> {
        Ok(self.jet(r)?.d1)
    }

    pub fn warped_radius(&self, r: f64) -> Option<Result<f64>> {
        self.exponent.warped_radius(r)
    }

    /// Checks `−2(1−κ)/r − tol/r ≤ Φ′(r) ≤ tol/r` at each sample, with `κ`
    /// the recorded hint. Returns the first violation.
    pub fn check_bound(&self, samples: &[f64], tol: f64) -> Result<()> {
        let kappa = self
            .kappa_hint
            .ok_or_else(|| Error::Unsupported("derivative bound needs an asymptotic cone parameter".into()))?;
        for &r in samples {
            let dphi = self.dphi(r)?;
            let lower = -2.0 * (1.0 - kappa) / r;
            if dphi * r < lower * r - tol {
                return Err(Error::ConformalBoundViolated { r, dphi, bound: lower });
            }
            if dphi * r > tol {
                return Err(Error::ConformalBoundViolated { r, dphi, bound: 0.0 });
            }
        }
        Ok(())
    }
}

/// Which variable parametrizes the inversion of `∫ dρ/λ = log r + c`.
#[derive(Debug, Clone)]
enum Chart {
    /// `x = λ`, using the graph's arc-length table: `k(τ) = (√(1+g²) − 1)/τ`.
    Graph(RadialGraph),
    /// `x = ρ`: `k(ρ) = 1/λ − 1/ρ`.
    Rho,
}

/// `Φ` obtained from a warped profile by solving for `ψ`.
#[derive(Debug, Clone)]
pub struct ChartExponent {
    profile: WarpedProfile,
    chart: Chart,
    /// `log r − log r_ref = log(x/x_ref) + K(x)` with `K(x) = ∫_{x_ref}^x k`.
    r_ref: f64,
    x_ref: f64,
    /// Chart nodes and `K` at each node.
    nodes: Vec<f64>,
    k_nodes: Vec<f64>,
    /// Closed-form tail `Φ = 2 log s + 2(s−1) log r` for `r ≥ r_tail`.
    tail: Option<TailForm>,
    pole_regular: bool,
}

#[derive(Debug, Clone, Copy)]
struct TailForm {
    r_start: f64,
    slope: f64,
    /// `λ = slope·(ρ + offset)` on the tail.
    offset: f64,
}

impl ChartExponent {
    fn k(&self, x: f64) -> f64 {
        match &self.chart {
            Chart::Graph(g) => {
                let s = g.shape().slope(x);
                // (√(1+s²) − 1)/x without cancellation
                s * s / ((1.0 + s * s).sqrt() + 1.0) / x
            }
            Chart::Rho => match self.profile.lambda(x) {
                Ok(l) => (x - l) / (l * x),
                Err(_) => f64::NAN,
            },
        }
    }

    fn big_k(&self, x: f64) -> f64 {
        let p = self.nodes.partition_point(|&v| v <= x);
        let j = p.saturating_sub(1).min(self.nodes.len() - 2);
        self.k_nodes[j] + gk15(&|s| self.k(s), self.nodes[j], x).0
    }

    fn x_min(&self) -> f64 {
        self.nodes[0]
    }

    fn x_max(&self) -> f64 {
        *self.nodes.last().expect("chart has nodes")
    }

    /// Chart variable at radius `r` (below the tail).
    fn chart_at(&self, r: f64) -> Result<f64> {
        let target = (r / self.r_ref).ln() + self.x_ref.ln();
        // f(u) = u + K(e^u) is increasing with f′ = 1 + x k(x)
        let f = |u: f64| {
            let x = u.exp();
            (u + self.big_k(x), 1.0 + x * self.k(x))
        };
        let fail = |reason: &str| Error::IntegrationFailure {
            r,
            reason: reason.to_string(),
        };
        let (u_min, u_max) = (self.x_min().max(f64::MIN_POSITIVE).ln(), self.x_max().ln());
        let k_lo = self.big_k(self.x_min().max(1e-300));
        let pad = |u: f64| 1e-9 * (1.0 + u.abs());
        let hi = target - k_lo;
        let hi = (hi + pad(hi)).min(u_max);
        if f(u_max).0 < target - 1e-12 {
            return Err(fail("radius lies beyond the tabulated profile"));
        }
        let lo = target - self.big_k(hi.exp());
        let lo = (lo - pad(lo)).max(u_min);
        if f(lo).0 > target + 1e-12 {
            return Err(fail("radius lies below the tabulated profile"));
        }
        if hi <= lo {
            return Ok(lo.exp());
        }
        let u = solve_monotone(f, target, lo, hi, 1e-14).map_err(|e| fail(&e.to_string()))?;
        Ok(u.exp())
    }

    /// `(λ, λ′, λ″)` at chart value `x`.
    fn lambda_jet(&self, x: f64) -> Result<Jet> {
        match &self.chart {
            Chart::Graph(g) => Ok(g.jet_at_param(x)),
            Chart::Rho => self.profile.jet(x),
        }
    }

    fn rho_of(&self, x: f64) -> f64 {
        match &self.chart {
            Chart::Graph(g) => g.arc_length(x),
            Chart::Rho => x,
        }
    }
}

impl ConformalExponent for ChartExponent {
    fn kind(&self) -> &'static str {
        "converted"
    }

    fn jet(&self, r: f64) -> Result<Jet> {
        if let Some(t) = self.tail {
            if r >= t.r_start {
                let s = t.slope;
                return Ok(Jet {
                    value: 2.0 * s.ln() + 2.0 * (s - 1.0) * r.ln(),
                    d1: 2.0 * (s - 1.0) / r,
                    d2: -2.0 * (s - 1.0) / (r * r),
                });
            }
        }
        if r == 0.0 {
            if !self.pole_regular {
                return Err(Error::PoleEvaluation { r });
            }
            // λ/r → x_ref·e^{−K(0)}/r_ref in the graph chart, likewise for ρ
            let k0 = self.big_k(self.x_min().max(1e-300));
            let inner = self.jet(1e-6 * self.r_ref)?;
            return Ok(Jet {
                value: 2.0 * ((self.x_ref / self.r_ref).ln() - k0),
                d1: 0.0,
                d2: inner.d2,
            });
        }
        let x = self.chart_at(r)?;
        let l = self.lambda_jet(x)?;
        Ok(Jet {
            value: 2.0 * (l.value / r).ln(),
            d1: 2.0 * (l.d1 - 1.0) / r,
            d2: 2.0 * (l.d2 * l.value - (l.d1 - 1.0)) / (r * r),
        })
    }

    fn regular_at_origin(&self) -> bool {
        self.pole_regular
    }

    fn warped_radius(&self, r: f64) -> Option<Result<f64>> {
        if let Some(t) = self.tail {
            if r >= t.r_start {
                return Some(Ok(r.powf(t.slope) - t.offset));
            }
        }
        Some(self.chart_at(r).map(|x| self.rho_of(x)))
    }
}

/// Rewrites `dρ² + λ²dθ²` as `e^{Φ(r)} Σ dxᵢ²`.
///
/// Profiles with a linear tail of slope `s` are normalized so that
/// `ψ(r) = r^s − c/s` on the tail, where `λ = sρ + c` there; for the capped
/// cone this is `r^κ − 1/κ + ρ₀` beyond `(1/κ)^{1/κ}`. Profiles without a
/// tail are normalized by `ψ(1) = 1` in the graph chart (`λ(ψ(1)) = 1`) or
/// by `ψ(1) = ρ_ref` at the midpoint of a tabulated domain.
///
/// The result is checked on samples: `ψ` increasing, and, when an
/// asymptotic slope `κ` is known, `−2(1−κ)/r ≤ Φ′ ≤ 0` within `10⁻⁶/r`.
pub fn warped_to_conformal(profile: &WarpedProfile) -> Result<ConformalRadialProfile> {
    let n = profile.n();
    let kappa = profile.asymptotic_slope();
    if let Some(k) = kappa {
        check_kappa_half_open(k)?;
    }
    let tail = profile.linear_tail();
    if let Some(t) = tail {
        if t.start == 0.0 && t.value_at_start == 0.0 {
            let k = t.slope;
            return ConformalRadialProfile::new(n, Some(k), Arc::new(ConeExponent { kappa: k }));
        }
    }
    let pole_regular = profile.pole_regular();
    let (chart, nodes) = match profile.warp().radial_graph() {
        Some(g) => {
            let mut nodes = g.t_nodes().to_vec();
            if let Some(t) = tail {
                nodes.retain(|&x| x <= t.value_at_start);
            }
            (Chart::Graph(g.clone()), nodes)
        }
        None => {
            let (lo, hi) = (profile.domain_min(), profile.domain_max());
            if !hi.is_finite() {
                return Err(Error::Unsupported(format!(
                    "profile kind `{}` has no finite chart for conversion",
                    profile.kind()
                )));
            }
            let hi = tail.map_or(hi, |t| t.start.min(hi));
            let m = 2048;
            let nodes: Vec<f64> = (0..=m).map(|i| lo + (hi - lo) * i as f64 / m as f64).collect();
            (Chart::Rho, nodes)
        }
    };
    let (x_ref, r_ref, tail_form) = match tail {
        Some(t) => {
            let s = t.slope;
            let c = t.value_at_start - s * t.start;
            let r_start = (t.value_at_start / s).powf(1.0 / s);
            let x_ref = match chart {
                Chart::Graph(_) => t.value_at_start,
                Chart::Rho => t.start,
            };
            (
                x_ref,
                r_start,
                Some(TailForm {
                    r_start,
                    slope: s,
                    offset: c / s,
                }),
            )
        }
        None => {
            let x_ref = match chart {
                Chart::Graph(_) => 1.0,
                Chart::Rho => 0.5 * (nodes[0] + nodes[nodes.len() - 1]),
            };
            (x_ref, 1.0, None)
        }
    };
    let mut exp = ChartExponent {
        profile: profile.clone(),
        chart,
        r_ref,
        x_ref,
        nodes,
        k_nodes: Vec::new(),
        tail: tail_form,
        pole_regular,
    };
    // cumulative K on nodes, anchored so that K(x_ref) = 0
    let opts = QuadOptions {
        abs_tol: 1e-14,
        rel_tol: 1e-13,
        max_panels: 1 << 10,
    };
    let mut k_nodes = Vec::with_capacity(exp.nodes.len());
    k_nodes.push(0.0);
    for w in exp.nodes.windows(2) {
        let piece = integrate(|s| exp.k(s), w[0], w[1], opts)?;
        if !piece.value.is_finite() {
            return Err(Error::IntegrationFailure {
                r: f64::NAN,
                reason: format!("non-finite integrand on [{}, {}]", w[0], w[1]),
            });
        }
        k_nodes.push(k_nodes.last().copied().unwrap_or(0.0) + piece.value);
    }
    exp.k_nodes = k_nodes;
    let shift = exp.big_k(x_ref);
    for v in &mut exp.k_nodes {
        *v -= shift;
    }
    let out = ConformalRadialProfile::new(n, kappa, Arc::new(exp))?;
    verify_conversion(&out, r_ref)?;
    Ok(out)
}

fn verify_conversion(p: &ConformalRadialProfile, r_ref: f64) -> Result<()> {
    let m = 200;
    let lo = 1e-3 * r_ref;
    let hi = 1e3 * r_ref;
    let mut prev_psi = f64::NEG_INFINITY;
    let kappa = p.kappa_hint();
    for i in 0..=m {
        let r = lo * (hi / lo).powf(i as f64 / m as f64);
        let j = match p.jet(r) {
            Ok(j) => j,
            Err(Error::IntegrationFailure { reason, .. }) if reason.contains("beyond") || reason.contains("below") => {
                continue
            }
            Err(e) => return Err(e),
        };
        if let Some(Ok(psi)) = p.warped_radius(r) {
            if psi <= prev_psi {
                return Err(Error::IntegrationFailure {
                    r,
                    reason: format!("psi not increasing: {psi} after {prev_psi}"),
                });
            }
            prev_psi = psi;
        }
        if let Some(k) = kappa {
            let scaled = j.d1 * r;
            if scaled < -2.0 * (1.0 - k) - 1e-6 || scaled > 1e-6 {
                return Err(Error::IntegrationFailure {
                    r,
                    reason: format!("phi'(r)·r = {scaled} outside [-2(1-kappa), 0] for kappa = {k}"),
                });
            }
        }
    }
    Ok(())
}
