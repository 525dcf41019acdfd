//! Least-squares fit of the two-dimensional Gouy-phase model to measured
//! (z′₀₊, ζ) data, and seeded synthetic data for recovery tests.
//!
//! The optimizer is Levenberg–Marquardt with a central-difference Jacobian
//! over the scaled parameters (ζ₀ [rad], z_f [mm]).

use std::fmt::Write as _;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::lens::{fit_model, FitModelParams};

/// Closest a sample may come to the model pole z′₀₊ = z_f.
pub const POLE_GUARD: f64 = 1e-6;
pub const DEFAULT_TOL: f64 = 1e-10;
const MAX_EVALUATIONS: usize = 100_000;
const STEP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataRow {
    /// Shifted Rayleigh length z′₀₊ in meters.
    pub z0p: f64,
    pub zeta: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataSet {
    pub rows: Vec<DataRow>,
}

impl DataSet {
    pub fn new(rows: Vec<DataRow>) -> Result<DataSet> {
        if rows.len() < 4 {
            return Err(Error::Data(format!(
                "{} rows; a two-parameter fit needs at least 4",
                rows.len()
            )));
        }
        for (i, r) in rows.iter().enumerate() {
            if !r.z0p.is_finite() || !r.zeta.is_finite() {
                return Err(Error::Data(format!("row {}: non-finite value", i + 1)));
            }
            if !(r.weight >= 0.0 && r.weight.is_finite()) {
                return Err(Error::Data(format!("row {}: weight must be ≥ 0", i + 1)));
            }
        }
        let mut sorted: Vec<f64> = rows.iter().map(|r| r.z0p).collect();
        sorted.sort_by(f64::total_cmp);
        if let Some(w) = sorted.windows(2).find(|w| (w[1] - w[0]).abs() <= 1e-12) {
            return Err(Error::Data(format!(
                "duplicate z0_plus value {} mm",
                w[0] * 1e3
            )));
        }
        Ok(DataSet { rows })
    }

    /// CSV with header `z0_plus_mm,zeta_rad[,weight]`. Extra columns are
    /// ignored, `#` lines and blank lines skipped.
    pub fn parse_csv(text: &str) -> Result<DataSet> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty data file".into(),
        })?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols.len() < 2 || cols[0] != "z0_plus_mm" || cols[1] != "zeta_rad" {
            return Err(Error::Parse {
                line: hline,
                msg: format!("header must start with z0_plus_mm,zeta_rad (got `{header}`)"),
            });
        }
        let weight_col = cols.iter().position(|c| *c == "weight");
        let mut rows = Vec::new();
        for (line, l) in lines {
            let fields: Vec<&str> = l.split(',').map(str::trim).collect();
            let num = |idx: usize, name: &str| -> Result<f64> {
                let s = fields.get(idx).ok_or(Error::Parse {
                    line,
                    msg: format!("missing {name}"),
                })?;
                s.parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    msg: format!("bad {name} `{s}`"),
                })
            };
            let weight = match weight_col {
                Some(c) => num(c, "weight")?,
                None => 1.0,
            };
            rows.push(DataRow {
                z0p: num(0, "z0_plus_mm")? * 1e-3,
                zeta: num(1, "zeta_rad")?,
                weight,
            });
        }
        DataSet::new(rows)
    }

    pub fn load(path: &Path) -> Result<DataSet> {
        DataSet::parse_csv(&std::fs::read_to_string(path)?)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("z0_plus_mm,zeta_rad,weight\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{}", r.z0p * 1e3, r.zeta, r.weight);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub zeta0: f64,
    /// Meters.
    pub z_f: f64,
    /// model − data per row, unweighted.
    pub residuals: Vec<f64>,
    /// Weighted sum of squared residuals.
    pub rss: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    pub message: String,
}

impl FitResult {
    pub fn params(&self, fixed: &FitModelParams) -> FitModelParams {
        FitModelParams {
            zeta0: self.zeta0,
            z_f: self.z_f,
            ..*fixed
        }
    }

    pub fn to_key_value(&self) -> String {
        let max_res = self.residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        format!(
            "zeta0_rad={}\nz_f_mm={}\nrss={:e}\nmax_abs_residual_rad={:e}\nn_points={}\niterations={}\nevaluations={}\nconverged={}\nmessage={}\n",
            self.zeta0,
            self.z_f * 1e3,
            self.rss,
            max_res,
            self.residuals.len(),
            self.iterations,
            self.evaluations,
            self.converged,
            self.message
        )
    }

    pub fn residuals_csv(&self, data: &DataSet) -> String {
        let mut out = String::from("z0_plus_mm,zeta_model_rad,zeta_data_rad,residual_rad\n");
        for (r, res) in data.rows.iter().zip(&self.residuals) {
            let _ = writeln!(out, "{},{},{},{}", r.z0p * 1e3, r.zeta + res, r.zeta, res);
        }
        out
    }
}

/// Scaled parameter vector: [ζ₀ (rad), z_f (mm)].
type P = [f64; 2];

fn unscale(p: &P, fixed: &FitModelParams) -> FitModelParams {
    FitModelParams {
        zeta0: p[0],
        z_f: p[1] * 1e-3,
        ..*fixed
    }
}

struct Problem<'a> {
    data: &'a DataSet,
    fixed: &'a FitModelParams,
    evaluations: usize,
}

impl Problem<'_> {
    /// √w·(model − data), or `None` when a sample sits on the pole.
    fn residuals(&mut self, p: &P) -> Option<Vec<f64>> {
        self.evaluations += 1;
        let params = unscale(p, self.fixed);
        self.data
            .rows
            .iter()
            .map(|r| {
                if (r.z0p - params.z_f).abs() < POLE_GUARD {
                    return None;
                }
                fit_model(r.z0p, &params)
                    .ok()
                    .map(|m| r.weight.sqrt() * (m - r.zeta))
            })
            .collect()
    }

    fn jacobian(&mut self, p: &P) -> Option<Vec<[f64; 2]>> {
        let mut cols = [Vec::new(), Vec::new()];
        for (k, col) in cols.iter_mut().enumerate() {
            let h = 1e-6 * p[k].abs().max(1.0);
            let (mut lo, mut hi) = (*p, *p);
            lo[k] -= h;
            hi[k] += h;
            let (rl, rh) = (self.residuals(&lo)?, self.residuals(&hi)?);
            *col = rl
                .iter()
                .zip(&rh)
                .map(|(a, b)| (b - a) / (2.0 * h))
                .collect();
        }
        Some(
            cols[0]
                .iter()
                .zip(&cols[1])
                .map(|(a, b)| [*a, *b])
                .collect(),
        )
    }
}

fn sum_sq(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum()
}

/// Fits ζ₀ and z_f with every other model parameter taken from `fixed`.
/// Non-convergence is reported through `converged = false`, not an error.
pub fn fit(
    data: &DataSet,
    fixed: &FitModelParams,
    init: (f64, f64),
    tol: f64,
) -> Result<FitResult> {
    if data.rows.len() < 4 {
        return Err(Error::Data(format!(
            "{} rows; need at least 4",
            data.rows.len()
        )));
    }
    if !init.0.is_finite() || !init.1.is_finite() {
        return Err(Error::Data("initial guess must be finite".into()));
    }
    let mut prob = Problem {
        data,
        fixed,
        evaluations: 0,
    };
    let mut p: P = [init.0, init.1 * 1e3];
    let mut r = prob
        .residuals(&p)
        .ok_or_else(|| Error::Pole("initial z_f coincides with a data point".into()))?;
    let mut rss = sum_sq(&r);
    let mut lambda = 1e-3;
    let mut iterations = 0;
    let (converged, message) = loop {
        if rss == 0.0 {
            break (true, "exact fit".to_string());
        }
        if prob.evaluations >= MAX_EVALUATIONS {
            break (
                false,
                format!("evaluation budget of {MAX_EVALUATIONS} exhausted"),
            );
        }
        iterations += 1;
        let Some(j) = prob.jacobian(&p) else {
            break (false, "Jacobian stencil touches the pole".to_string());
        };
        let (mut a, mut g) = ([[0.0; 2]; 2], [0.0; 2]);
        for (row, ri) in j.iter().zip(&r) {
            for u in 0..2 {
                g[u] += row[u] * ri;
                for v in 0..2 {
                    a[u][v] += row[u] * row[v];
                }
            }
        }
        // Inner loop: raise λ until a step lowers rss or becomes negligible.
        let outcome = loop {
            let m = [
                [a[0][0] * (1.0 + lambda), a[0][1]],
                [a[1][0], a[1][1] * (1.0 + lambda)],
            ];
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            if det == 0.0 || !det.is_finite() {
                break Err("singular normal equations".to_string());
            }
            let step = [
                -(m[1][1] * g[0] - m[0][1] * g[1]) / det,
                -(m[0][0] * g[1] - m[1][0] * g[0]) / det,
            ];
            let size = step[0].hypot(step[1]);
            if size < STEP_TOL * (1.0 + p[0].hypot(p[1])) {
                break Ok(None);
            }
            let trial = [p[0] + step[0], p[1] + step[1]];
            if let Some(rt) = prob.residuals(&trial) {
                let rss_t = sum_sq(&rt);
                if rss_t < rss {
                    lambda = (lambda / 10.0).max(1e-12);
                    break Ok(Some((trial, rt, rss_t)));
                }
            }
            lambda *= 10.0;
            if prob.evaluations >= MAX_EVALUATIONS {
                break Err(format!("evaluation budget of {MAX_EVALUATIONS} exhausted"));
            }
        };
        match outcome {
            Err(msg) => break (false, msg),
            Ok(None) => break (true, "parameter step below tolerance".to_string()),
            Ok(Some((trial, rt, rss_t))) => {
                let rel = (rss - rss_t) / rss;
                p = trial;
                r = rt;
                rss = rss_t;
                if rel < tol {
                    break (true, "relative rss change below tolerance".to_string());
                }
            }
        }
    };
    let params = unscale(&p, fixed);
    let residuals = data
        .rows
        .iter()
        .map(|row| fit_model(row.z0p, &params).map(|m| m - row.zeta))
        .collect::<Result<Vec<_>>>()?;
    Ok(FitResult {
        zeta0: params.zeta0,
        z_f: params.z_f,
        residuals,
        rss,
        iterations,
        evaluations: prob.evaluations,
        converged,
        message,
    })
}

/// Samples `fit_model` on `grid` and adds N(0, noise_std²) noise from a
/// ChaCha8 stream seeded with `seed`.
pub fn synthesize(
    params: &FitModelParams,
    grid: &[f64],
    noise_std: f64,
    seed: u64,
) -> Result<DataSet> {
    if !(noise_std >= 0.0 && noise_std.is_finite()) {
        return Err(Error::Domain {
            field: "noise_std",
            value: noise_std,
        });
    }
    let normal = Normal::new(0.0, noise_std).map_err(|e| Error::Data(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(grid.len());
    for &z in grid {
        if (z - params.z_f).abs() < POLE_GUARD {
            return Err(Error::Domain {
                field: "grid point near pole",
                value: z,
            });
        }
        let clean = fit_model(z, params)?;
        let noise = if noise_std > 0.0 {
            normal.sample(&mut rng)
        } else {
            0.0
        };
        rows.push(DataRow {
            z0p: z,
            zeta: clean + noise,
            weight: 1.0,
        });
    }
    DataSet::new(rows)
}

/// `n` log-spaced points on [lo, hi].
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Default synthetic abscissa: 30 log-spaced z′₀₊ from 10 mm to 100 m, all
/// above the published z_f.
pub fn default_synthetic_grid() -> Vec<f64> {
    log_grid(1e-2, 100.0, 30)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn published() -> FitModelParams {
        FitModelParams::published()
    }

    fn noiseless() -> DataSet {
        synthesize(&published(), &default_synthetic_grid(), 0.0, 0).unwrap()
    }

    #[test]
    fn noiseless_rows_lie_on_the_curve() {
        let d = noiseless();
        for r in &d.rows {
            assert_eq!(r.zeta, fit_model(r.z0p, &published()).unwrap());
        }
    }

    #[test]
    fn synthetic_curve_saturates_toward_limit() {
        let d = noiseless();
        let z: Vec<f64> = d.rows.iter().map(|r| r.zeta).collect();
        // Falls monotonically from ζ₀ + π/2 + arctan(u/z0₋) and levels off
        // above the z′₀₊ → ∞ limit of ≈ 3.25 rad.
        assert!(z.windows(2).all(|w| w[1] < w[0]));
        let limit = fit_model(1e12, &published()).unwrap();
        assert!((limit - 3.25).abs() < 5e-3);
        let gap = z.last().unwrap() - limit;
        assert!(gap > 0.0 && gap < 0.02, "{gap}");
    }

    #[test]
    fn same_seed_same_data() {
        let g = default_synthetic_grid();
        let a = synthesize(&published(), &g, 0.05, 42).unwrap();
        let b = synthesize(&published(), &g, 0.05, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, synthesize(&published(), &g, 0.05, 43).unwrap());
    }

    #[test]
    fn pole_on_grid_is_rejected() {
        let mut g = default_synthetic_grid();
        g.push(published().z_f + 1e-7);
        assert!(matches!(
            synthesize(&published(), &g, 0.0, 0),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn recovers_published_parameters_without_noise() {
        let d = noiseless();
        for (s0, sf) in [(1.2, 1.2), (0.8, 0.8), (1.2, 0.8), (0.8, 1.2)] {
            let r = fit(&d, &published(), (1.68 * s0, 7.15e-3 * sf), DEFAULT_TOL).unwrap();
            assert!(r.converged, "{}", r.message);
            assert_relative_eq!(r.zeta0, 1.68, max_relative = 1e-6);
            assert_relative_eq!(r.z_f, 7.15e-3, max_relative = 1e-6);
            assert!(r.residuals.iter().all(|x| x.abs() < 1e-6));
        }
    }

    #[test]
    fn fit_is_deterministic() {
        let d = synthesize(&published(), &default_synthetic_grid(), 0.05, 9).unwrap();
        let a = fit(&d, &published(), (1.5, 8e-3), DEFAULT_TOL).unwrap();
        let b = fit(&d, &published(), (1.5, 8e-3), DEFAULT_TOL).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn shifting_abscissa_shifts_z_f() {
        let d = noiseless();
        let delta = 3e-3;
        let shifted = DataSet::new(
            d.rows
                .iter()
                .map(|r| DataRow {
                    z0p: r.z0p + delta,
                    ..*r
                })
                .collect(),
        )
        .unwrap();
        let a = fit(&d, &published(), (1.5, 6e-3), DEFAULT_TOL).unwrap();
        let b = fit(&shifted, &published(), (1.5, 6e-3 + delta), DEFAULT_TOL).unwrap();
        assert_relative_eq!(b.z_f - a.z_f, delta, max_relative = 1e-5);
        assert_relative_eq!(a.zeta0, b.zeta0, max_relative = 1e-8);
    }

    #[test]
    fn too_few_rows() {
        let rows: Vec<DataRow> = (0..3)
            .map(|i| DataRow {
                z0p: 0.01 * (i + 1) as f64,
                zeta: 2.0,
                weight: 1.0,
            })
            .collect();
        assert!(matches!(DataSet::new(rows), Err(Error::Data(_))));
        let csv = "z0_plus_mm,zeta_rad\n10,2\n20,2.1\n30,2.2\n";
        assert!(matches!(DataSet::parse_csv(csv), Err(Error::Data(_))));
    }

    #[test]
    fn csv_parsing() {
        let csv = "# digitized\nz0_plus_mm,zeta_rad,weight,note\n-5,1.0,0.5,a\n\n10,2.0,1,b\n20,2.5,1,c\n# end\n40,2.9,2,d\n";
        let d = DataSet::parse_csv(csv).unwrap();
        assert_eq!(d.rows.len(), 4);
        assert_eq!(
            d.rows[0],
            DataRow {
                z0p: -5e-3,
                zeta: 1.0,
                weight: 0.5
            }
        );
        assert_eq!(d.rows[3].weight, 2.0);
        let err = DataSet::parse_csv("z0_plus_mm,zeta_rad\n1,2\n2,x\n3,4\n4,5\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
        assert!(DataSet::parse_csv("z,zeta\n1,2\n").is_err());
        assert!(DataSet::parse_csv("z0_plus_mm,zeta_rad\n1,2\n1,3\n2,4\n3,5\n").is_err());
        let round = DataSet::parse_csv(&d.to_csv()).unwrap();
        assert_eq!(round.rows.len(), 4);
    }

    #[test]
    fn output_formats() {
        let d = noiseless();
        let r = fit(&d, &published(), (1.5, 6e-3), DEFAULT_TOL).unwrap();
        let kv = r.to_key_value();
        assert!(kv.contains("converged=true"));
        assert!(kv.lines().any(|l| l.starts_with("z_f_mm=7.15")));
        let csv = r.residuals_csv(&d);
        assert!(csv.starts_with("z0_plus_mm,zeta_model_rad,zeta_data_rad,residual_rad\n"));
        assert_eq!(csv.lines().count(), d.rows.len() + 1);
    }

    #[test]
    fn noisy_recovery_on_well_conditioned_arrangement() {
        // u ≈ 5 mm puts the model's z_f sensitivity where the data are.
        // The published arrangement (u ≈ 1.28 m) does not allow this.
        let fixed = FitModelParams {
            z: 2.5e-3,
            z_prime: 2.5e-3,
            ..published()
        };
        let grid = log_grid(9e-3, 0.2, 30);
        let mut good = 0;
        for seed in 0..20 {
            let d = synthesize(&fixed, &grid, 0.05, seed).unwrap();
            let r = fit(&d, &fixed, (1.68 * 1.2, 7.15e-3 * 0.8), DEFAULT_TOL).unwrap();
            if r.converged
                && (r.zeta0 / 1.68 - 1.0).abs() < 0.05
                && (r.z_f / 7.15e-3 - 1.0).abs() < 0.05
            {
                good += 1;
            }
        }
        assert!(good >= 18, "{good}/20");
    }
}
