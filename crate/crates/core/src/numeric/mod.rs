//! Numerical building blocks shared by the geometry modules.

pub mod quad;
pub mod richardson;
pub mod roots;
pub mod spline;
pub mod tridiag;

/// Derivative jet of a scalar function of one variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Central-difference jet of `f` at `x` with step `h`.
pub fn central_jet<F: Fn(f64) -> crate::Result<f64>>(f: F, x: f64, h: f64) -> crate::Result<Jet> {
    let f0 = f(x)?;
    let fp = f(x + h)?;
    let fm = f(x - h)?;
    Ok(Jet {
        value: f0,
        d1: (fp - fm) / (2.0 * h),
        d2: (fp - 2.0 * f0 + fm) / (h * h),
    })
}

/// Surface measure of the unit `n`-sphere in `R^{n+1}`.
pub fn unit_sphere_measure(n: usize) -> f64 {
    use std::f64::consts::PI;
    // ω₀ = 2, ω₁ = 2π, ω_n = 2π ω_{n-2} / (n-1)
    let mut even = 2.0;
    let mut odd = 2.0 * PI;
    if n == 0 {
        return even;
    }
    if n == 1 {
        return odd;
    }
    for k in 2..=n {
        if k % 2 == 0 {
            even = 2.0 * PI * even / (k as f64 - 1.0);
        } else {
            odd = 2.0 * PI * odd / (k as f64 - 1.0);
        }
    }
    if n.is_multiple_of(2) {
        even
    } else {
        odd
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sphere_measures() {
        assert!((unit_sphere_measure(2) - 4.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_measure(3) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((unit_sphere_measure(4) - 8.0 * PI * PI / 3.0).abs() < 1e-12);
    }
}
