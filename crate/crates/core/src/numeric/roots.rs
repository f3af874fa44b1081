//! Safeguarded Newton iteration and bisection for monotone scalar equations.

use crate::error::{Error, Result};

const MAX_ITER: usize = 200;

/// Solves `f(x) = target` on `[lo, hi]` where `f` is monotone.
///
/// `f` returns the value and derivative. Newton steps that leave the
/// current bracket, or that fail to halve it, fall back to bisection.
pub fn solve_monotone<F>(f: F, target: f64, lo: f64, hi: f64, xtol: f64) -> Result<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    let (f_lo, _) = f(lo);
    let (f_hi, _) = f(hi);
    let g_lo = f_lo - target;
    let g_hi = f_hi - target;
    let fail = || Error::InversionFailed {
        target,
        lo,
        hi,
        f_lo,
        f_hi,
    };
    if !(g_lo.is_finite() && g_hi.is_finite()) {
        return Err(fail());
    }
    if g_lo == 0.0 {
        return Ok(lo);
    }
    if g_hi == 0.0 {
        return Ok(hi);
    }
    if g_lo.signum() == g_hi.signum() {
        return Err(fail());
    }
    // orient so that g(a) < 0 < g(b)
    let (mut a, mut b) = if g_lo < 0.0 { (lo, hi) } else { (hi, lo) };
    let mut x = 0.5 * (lo + hi);
    let mut dx_old = (hi - lo).abs();
    let mut dx = dx_old;
    let (mut fx, mut dfx) = f(x);
    fx -= target;
    for _ in 0..MAX_ITER {
        let newton_ok = dfx != 0.0 && dfx.is_finite() && {
            let xn = x - fx / dfx;
            (xn - a) * (xn - b) < 0.0 && (2.0 * fx).abs() <= (dx_old * dfx).abs()
        };
        dx_old = dx;
        if newton_ok {
            dx = fx / dfx;
            x -= dx;
        } else {
            dx = 0.5 * (b - a);
            x = a + dx;
        }
        if dx.abs() <= xtol * (1.0 + x.abs()) {
            return Ok(x);
        }
        let (v, d) = f(x);
        fx = v - target;
        dfx = d;
        if !fx.is_finite() {
            return Err(fail());
        }
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            a = x;
        } else {
            b = x;
        }
        if (b - a).abs() <= xtol * (1.0 + x.abs()) {
            return Ok(x);
        }
    }
    Err(fail())
}

/// Plain bisection for a sign change of `g` on `[lo, hi]`.
pub fn bisect<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64, xtol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (ga, gb) = (g(a), g(b));
    if ga.signum() == gb.signum() && ga != 0.0 && gb != 0.0 {
        return Err(Error::InversionFailed {
            target: 0.0,
            lo,
            hi,
            f_lo: ga,
            f_hi: gb,
        });
    }
    let neg_at_a = ga < 0.0;
    while (b - a).abs() > xtol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let gm = g(m);
        if (gm < 0.0) == neg_at_a {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}
