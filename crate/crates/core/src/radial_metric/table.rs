//! Profiles read from a two-column `(ρ, λ)` table and interpolated by a
//! natural cubic spline.

use std::fs;
use std::path::Path;

use super::Warping;
use crate::error::{Error, Result};
use crate::numeric::spline::CubicSpline;
use crate::numeric::Jet;

#[derive(Debug, Clone)]
pub struct TableWarp {
    spline: CubicSpline,
    pole_regular: bool,
    slope_hint: Option<f64>,
}

impl TableWarp {
    pub fn from_points(rho: Vec<f64>, lambda: Vec<f64>, slope_hint: Option<f64>) -> Result<Self> {
        for (i, (&r, &l)) in rho.iter().zip(&lambda).enumerate() {
            if !(l > 0.0) && !(i == 0 && r == 0.0 && l == 0.0) {
                return Err(Error::param("lambda", l, format!("must be positive (row {})", i + 1)));
            }
        }
        let spline = CubicSpline::natural(rho, lambda)?;
        let (v0, d0, _) = spline.eval(spline.x_min());
        let pole_regular = spline.x_min() == 0.0 && v0 == 0.0 && (d0 - 1.0).abs() < 1e-3;
        Ok(Self {
            spline,
            pole_regular,
            slope_hint,
        })
    }

    /// Parses whitespace- or comma-separated rows; `#` starts a comment.
    pub fn parse(text: &str, slope_hint: Option<f64>) -> Result<Self> {
        let mut rho = Vec::new();
        let mut lambda = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            if cols.len() != 2 {
                return Err(Error::Unsupported(format!(
                    "table line {}: expected 2 columns, found {}",
                    lineno + 1,
                    cols.len()
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::Unsupported(format!("table line {}: `{s}` is not a number", lineno + 1)))
            };
            rho.push(parse(cols[0])?);
            lambda.push(parse(cols[1])?);
        }
        Self::from_points(rho, lambda, slope_hint)
    }

    pub fn from_file(path: &Path, slope_hint: Option<f64>) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Unsupported(format!("cannot read table {}: {e}", path.display())))?;
        Self::parse(&text, slope_hint)
    }
}

impl Warping for TableWarp {
    fn kind(&self) -> &'static str {
        "table"
    }

    fn lambda(&self, rho: f64) -> Result<f64> {
        Ok(self.spline.eval(rho).0)
    }

    fn jet(&self, rho: f64) -> Result<Jet> {
        let (value, d1, d2) = self.spline.eval(rho);
        Ok(Jet { value, d1, d2 })
    }

    fn domain(&self) -> (f64, f64) {
        (self.spline.x_min(), self.spline.x_max())
    }

    fn pole_regular(&self) -> bool {
        self.pole_regular
    }

    fn asymptotic_slope(&self) -> Option<f64> {
        self.slope_hint
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial_metric::WarpedProfile;
    use std::sync::Arc;

    #[test]
    fn parses_and_interpolates_linear_table() {
        let text = "# rho lambda\n0.5, 0.25\n1 0.5\n2 1.0\n4 2.0\n";
        let w = TableWarp::parse(text, Some(0.5)).unwrap();
        let p = WarpedProfile::new(3, Arc::new(w)).unwrap();
        assert!((p.lambda(3.0).unwrap() - 1.5).abs() < 1e-14);
        assert!(p.lambda(5.0).is_err());
        assert!(!p.pole_regular());
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(TableWarp::parse("1 2 3\n", None).is_err());
        assert!(TableWarp::parse("1 x\n2 1\n3 1\n", None).is_err());
        assert!(TableWarp::parse("1 1\n0.5 1\n3 1\n", None).is_err());
        assert!(TableWarp::parse("1 -1\n2 1\n3 1\n", None).is_err());
    }
}
