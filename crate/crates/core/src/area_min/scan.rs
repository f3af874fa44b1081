use rayon::prelude::*;

use super::descent::{minimize, seed_profile, MinimizeOptions, Verdict};
use super::{EquivariantAreaProblem, GridKind};
use crate::error::{Error, Result};
use crate::radial_metric::{cone_conformal, ConformalRadialProfile};

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub kappa: f64,
    pub area_flat: f64,
    pub area_min: f64,
    pub verdict: Verdict,
    pub converged: bool,
    pub iterations: usize,
}

impl ScanRow {
    pub fn gap(&self) -> f64 {
        self.area_flat - self.area_min
    }
}

#[derive(Debug, Clone)]
pub struct ScanTable {
    pub n: usize,
    pub rows: Vec<ScanRow>,
    /// Midpoint between the last `CompetitorBeatsFlat` and the first
    /// `FlatIsMin` row, when the verdicts split once.
    pub transition: Option<f64>,
    /// Verdicts are not a single block of `CompetitorBeatsFlat` followed by
    /// `FlatIsMin`.
    pub non_monotone: bool,
}

impl ScanTable {
    /// Columns `kappa area_flat area_min gap verdict`.
    pub fn table(&self) -> String {
        let mut out = String::from("kappa area_flat area_min gap verdict\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{:.11e} {:.11e} {:.11e} {:.11e} {}\n",
                r.kappa,
                r.area_flat,
                r.area_min,
                r.gap(),
                r.verdict.short()
            ));
        }
        out
    }
}

/// Domain, grid and seed shared by every row of a scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSetup {
    pub w_outer: f64,
    pub grid_size: usize,
    pub kind: GridKind,
    /// Seed amplitude over `W`.
    pub amplitude: f64,
}

impl Default for ScanSetup {
    fn default() -> Self {
        Self {
            w_outer: 1.0,
            grid_size: 256,
            kind: GridKind::DEFAULT,
            amplitude: 0.05,
        }
    }
}

/// Runs [`minimize`] on the cone `CS_κ` for each `κ`, from the standard seed.
pub fn threshold_scan(
    n: usize,
    kappas: &[f64],
    w_outer: f64,
    grid_size: usize,
    kind: GridKind,
    opts: MinimizeOptions,
) -> Result<ScanTable> {
    let setup = ScanSetup {
        w_outer,
        grid_size,
        kind,
        ..Default::default()
    };
    threshold_scan_with(n, kappas, |k| cone_conformal(k, n), setup, opts)
}

/// [`threshold_scan`] over any one-parameter family of metrics.
pub fn threshold_scan_with<B>(
    n: usize,
    kappas: &[f64],
    build: B,
    setup: ScanSetup,
    opts: MinimizeOptions,
) -> Result<ScanTable>
where
    B: Fn(f64) -> Result<ConformalRadialProfile> + Sync,
{
    if kappas.is_empty() {
        return Err(Error::param("kappa grid", 0.0, "empty"));
    }
    let mut sorted = kappas.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rows: Vec<ScanRow> = sorted
        .par_iter()
        .map(|&kappa| -> Result<ScanRow> {
            let metric = build(kappa)?;
            if metric.n() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: metric.n(),
                });
            }
            let problem = EquivariantAreaProblem::new(metric, setup.w_outer, setup.grid_size, setup.kind)?;
            let seed = seed_profile(&problem, setup.amplitude * setup.w_outer);
            let res = minimize(&problem, &seed, opts)?;
            Ok(ScanRow {
                kappa,
                area_flat: res.area_flat,
                area_min: res.area_min,
                verdict: res.verdict,
                converged: res.converged,
                iterations: res.iterations,
            })
        })
        .collect::<Result<_>>()?;
    let flips = rows.windows(2).filter(|w| w[0].verdict != w[1].verdict).count();
    let starts_unstable = rows[0].verdict == Verdict::CompetitorBeatsFlat;
    let non_monotone = flips > 1 || (flips == 1 && !starts_unstable);
    let transition = if flips == 1 && starts_unstable {
        rows.windows(2)
            .find(|w| w[0].verdict != w[1].verdict)
            .map(|w| 0.5 * (w[0].kappa + w[1].kappa))
    } else {
        None
    };
    Ok(ScanTable {
        n,
        rows,
        transition,
        non_monotone,
    })
}
