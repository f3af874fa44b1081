//! Scalar fields on `R^{n+1}`, either Cartesian or given in the polar pair
//! `(θ, r)` with `θ = x_{n+1}/r`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// `F` and its partials in `(θ, r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarJet {
    pub f: f64,
    pub f_t: f64,
    pub f_r: f64,
    pub f_tt: f64,
    pub f_rr: f64,
    pub f_rt: f64,
}

/// A twice differentiable field `F(θ, r)` on `[−1, 1] × (0, ∞)`.
pub trait ScalarFieldPolar: Send + Sync {
    fn label(&self) -> String;

    fn value(&self, theta: f64, r: f64) -> f64;

    /// Partials; by default central differences with step `10⁻⁵·max(1, r)`.
    fn jet(&self, theta: f64, r: f64) -> PolarJet {
        fd_polar_jet(self, theta, r, 1e-5 * r.max(1.0))
    }
}

pub fn fd_polar_jet<F: ScalarFieldPolar + ?Sized>(field: &F, theta: f64, r: f64, h: f64) -> PolarJet {
    let v = |t: f64, s: f64| field.value(t, s);
    let f = v(theta, r);
    let (tp, tm) = (v(theta + h, r), v(theta - h, r));
    let (rp, rm) = (v(theta, r + h), v(theta, r - h));
    let mixed = (v(theta + h, r + h) - v(theta + h, r - h) - v(theta - h, r + h) + v(theta - h, r - h)) / (4.0 * h * h);
    PolarJet {
        f,
        f_t: (tp - tm) / (2.0 * h),
        f_r: (rp - rm) / (2.0 * h),
        f_tt: (tp - 2.0 * f + tm) / (h * h),
        f_rr: (rp - 2.0 * f + rm) / (h * h),
        f_rt: mixed,
    }
}

/// `|∂_r(F_θ) − ∂_θ(F_r)|` from central differences of the first partials.
pub fn cross_partial_gap<F: ScalarFieldPolar + ?Sized>(field: &F, theta: f64, r: f64, h: f64) -> f64 {
    let a = (field.jet(theta, r + h).f_t - field.jet(theta, r - h).f_t) / (2.0 * h);
    let b = (field.jet(theta + h, r).f_r - field.jet(theta - h, r).f_r) / (2.0 * h);
    (a - b).abs()
}

/// Value, flat gradient and flat Hessian at a point of `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct CartesianJet {
    pub value: f64,
    pub grad: DVector<f64>,
    pub hess: DMatrix<f64>,
}

/// A twice differentiable field on `R^d`.
pub trait ScalarField: Send + Sync {
    fn label(&self) -> String;

    fn value(&self, x: &[f64]) -> f64;

    /// Flat derivatives; by default central differences with step
    /// `10⁻⁴·max(1, |x|)`.
    fn jet(&self, x: &[f64]) -> CartesianJet {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        fd_cartesian_jet(self, x, 1e-4 * norm.max(1.0))
    }
}

pub fn fd_cartesian_jet<F: ScalarField + ?Sized>(field: &F, x: &[f64], h: f64) -> CartesianJet {
    let d = x.len();
    let mut y = x.to_vec();
    let f0 = field.value(x);
    let mut grad = DVector::zeros(d);
    let mut hess = DMatrix::zeros(d, d);
    let eval = |y: &mut Vec<f64>, i: usize, di: f64, j: usize, dj: f64| {
        y[i] += di;
        y[j] += dj;
        let v = field.value(y);
        y[i] -= di;
        y[j] -= dj;
        v
    };
    for i in 0..d {
        let fp = eval(&mut y, i, h, i, 0.0);
        let fm = eval(&mut y, i, -h, i, 0.0);
        grad[i] = (fp - fm) / (2.0 * h);
        hess[(i, i)] = (fp - 2.0 * f0 + fm) / (h * h);
        for j in 0..i {
            let v = (eval(&mut y, i, h, j, h) - eval(&mut y, i, h, j, -h) - eval(&mut y, i, -h, j, h)
                + eval(&mut y, i, -h, j, -h))
                / (4.0 * h * h);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    CartesianJet { value: f0, grad, hess }
}

/// `θ = x_{n+1}/r` and `r = |x|`, the last coordinate being `x_{n+1}`.
pub fn polar_coordinates(x: &[f64]) -> (f64, f64) {
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let last = *x.last().expect("point has coordinates");
    ((last / r).clamp(-1.0, 1.0), r)
}

/// The point `r(√(1−θ²)·e, θ)` of `R^{d}` for a unit vector `e ∈ R^{d−1}`.
pub fn polar_point(theta: f64, r: f64, e: &[f64]) -> Vec<f64> {
    let s = (1.0 - theta * theta).max(0.0).sqrt();
    let mut x: Vec<f64> = e.iter().map(|v| r * s * v).collect();
    x.push(r * theta);
    x
}

/// A polar field seen as a field on `R^d`; derivatives by the chain rule.
#[derive(Debug, Clone)]
pub struct Polar<F>(pub F);

impl<F: ScalarFieldPolar> ScalarField for Polar<F> {
    fn label(&self) -> String {
        self.0.label()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let (t, r) = polar_coordinates(x);
        self.0.value(t, r)
    }

    fn jet(&self, x: &[f64]) -> CartesianJet {
        let (theta, r) = polar_coordinates(x);
        cartesian_from_polar(&self.0.jet(theta, r), x)
    }
}

/// Chain rule from `(θ, r)` partials to flat derivatives at `x ≠ 0`.
pub fn cartesian_from_polar(p: &PolarJet, x: &[f64]) -> CartesianJet {
    let d = x.len();
    let last = d - 1;
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let xn = x[last];
    let (r2, r3) = (r * r, r * r * r);
    let r5 = r3 * r2;
    let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    let dr: Vec<f64> = x.iter().map(|v| v / r).collect();
    let dt: Vec<f64> = (0..d).map(|i| delta(i, last) / r - xn * x[i] / r3).collect();
    let mut grad = DVector::zeros(d);
    let mut hess = DMatrix::zeros(d, d);
    for i in 0..d {
        grad[i] = p.f_t * dt[i] + p.f_r * dr[i];
        for j in 0..=i {
            let drr = delta(i, j) / r - x[i] * x[j] / r3;
            let dtt = -(delta(i, last) * x[j] + delta(j, last) * x[i]) / r3 - xn * delta(i, j) / r3
                + 3.0 * xn * x[i] * x[j] / r5;
            let v = p.f_tt * dt[i] * dt[j]
                + p.f_rt * (dt[i] * dr[j] + dr[i] * dt[j])
                + p.f_rr * dr[i] * dr[j]
                + p.f_t * dtt
                + p.f_r * drr;
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    CartesianJet { value: p.f, grad, hess }
}

/// `F = Σ cₖ θ^{aₖ} r^{bₖ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarMonomialSum {
    pub terms: Vec<(f64, i32, f64)>,
}

impl PolarMonomialSum {
    /// Three terms with `c ∈ [−1, 1]`, `a ∈ {0,…,3}`, `b ∈ [0.5, 2.5]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let terms = (0..3)
            .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(0..4), rng.gen_range(0.5..2.5)))
            .collect();
        Self { terms }
    }
}

impl ScalarFieldPolar for PolarMonomialSum {
    fn label(&self) -> String {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(c, a, b)| format!("{c:+.4}*t^{a}*r^{b:.4}"))
            .collect();
        parts.join(" ")
    }

    fn value(&self, theta: f64, r: f64) -> f64 {
        self.terms.iter().map(|&(c, a, b)| c * theta.powi(a) * r.powf(b)).sum()
    }

    fn jet(&self, theta: f64, r: f64) -> PolarJet {
        let mut j = PolarJet {
            f: 0.0,
            f_t: 0.0,
            f_r: 0.0,
            f_tt: 0.0,
            f_rr: 0.0,
            f_rt: 0.0,
        };
        for &(c, a, b) in &self.terms {
            let af = a as f64;
            let t0 = theta.powi(a);
            let t1 = if a >= 1 { af * theta.powi(a - 1) } else { 0.0 };
            let t2 = if a >= 2 {
                af * (af - 1.0) * theta.powi(a - 2)
            } else {
                0.0
            };
            let r0 = r.powf(b);
            let r1 = b * r.powf(b - 1.0);
            let r2 = b * (b - 1.0) * r.powf(b - 2.0);
            j.f += c * t0 * r0;
            j.f_t += c * t1 * r0;
            j.f_r += c * t0 * r1;
            j.f_tt += c * t2 * r0;
            j.f_rr += c * t0 * r2;
            j.f_rt += c * t1 * r1;
        }
        j
    }
}

/// A field defined by a closure, differentiated numerically.
pub struct FnField<G> {
    pub label: String,
    pub f: G,
}

impl<G: Fn(&[f64]) -> f64 + Send + Sync> ScalarField for FnField<G> {
    fn label(&self) -> String {
        self.label.clone()
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

/// `u(x) = c + b·x + ½ xᵀAx`, with exact derivatives.
#[derive(Debug, Clone)]
pub struct QuadraticField {
    pub c: f64,
    pub b: DVector<f64>,
    pub a: DMatrix<f64>,
}

impl ScalarField for QuadraticField {
    fn label(&self) -> String {
        "quadratic".into()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let x = DVector::from_column_slice(x);
        self.c + self.b.dot(&x) + 0.5 * x.dot(&(&self.a * &x))
    }

    fn jet(&self, x: &[f64]) -> CartesianJet {
        let xv = DVector::from_column_slice(x);
        let sym = 0.5 * (&self.a + self.a.transpose());
        CartesianJet {
            value: self.value(x),
            grad: &self.b + &sym * &xv,
            hess: sym,
        }
    }
}
