//! Data behind each figure, with per-figure defaults taken from the
//! published captions. Every table records the parameters it used.

use std::fmt;
use std::str::FromStr;

use clap::ValueEnum;

use crate::entangle::{
    log_negativity, log_negativity_from_spectrum, moments, pt_spectrum, schmidt_number_closed,
};
use crate::error::{Error, Result};
use crate::fit::{log_grid, DataSet};
use crate::freeprop::gouy_free;
use crate::lens::{
    fit_model, gouy_lens, gouy_lens_continuous, gouy_lens_exact, waist_position, FitModelParams,
    LensSetup,
};
use crate::params::{derive_sigma, DerivedScales, ExperimentParams};

use super::table::Table;

pub const MIN_POINTS: usize = 50;
pub const DEFAULT_POINTS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum)]
pub enum FigureId {
    Fig1,
    Fig2a,
    Fig2b,
    Fig3a,
    Fig3b,
    Fig3c,
    Fig3d,
    Fig4,
    Fig5,
    Fig6,
}

impl FigureId {
    pub const ALL: [FigureId; 10] = [
        FigureId::Fig1,
        FigureId::Fig2a,
        FigureId::Fig2b,
        FigureId::Fig3a,
        FigureId::Fig3b,
        FigureId::Fig3c,
        FigureId::Fig3d,
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::Fig6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig1 => "fig1",
            FigureId::Fig2a => "fig2a",
            FigureId::Fig2b => "fig2b",
            FigureId::Fig3a => "fig3a",
            FigureId::Fig3b => "fig3b",
            FigureId::Fig3c => "fig3c",
            FigureId::Fig3d => "fig3d",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        FigureId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| format!("unknown figure `{s}`"))
    }
}

/// Optional overrides of the baked-in figure parameters. Each applies only
/// to the figures that have such a parameter.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FigureOverrides {
    /// Crystal-to-lens (or observation) distance.
    pub z: Option<f64>,
    pub f: Option<f64>,
    pub z0_minus: Option<f64>,
    /// Measured points for fig5.
    pub data: Option<DataSet>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureRequest {
    pub id: FigureId,
    pub points: usize,
    pub overrides: FigureOverrides,
}

impl FigureRequest {
    pub fn new(id: FigureId) -> FigureRequest {
        FigureRequest {
            id,
            points: DEFAULT_POINTS,
            overrides: FigureOverrides::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < MIN_POINTS {
            return Err(Error::Domain {
                field: "points (minimum 50)",
                value: self.points as f64,
            });
        }
        if self.id == FigureId::Fig5 && self.overrides.data.is_none() {
            return Err(Error::Data(
                "fig5 overlays measured data: pass --data <csv>".into(),
            ));
        }
        Ok(())
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn common_meta(t: &mut Table, p: &ExperimentParams, points: usize) {
    t.meta("lambda_m", p.lambda)
        .meta("lambda_p_m", p.lambda_p)
        .meta("L_p_m", p.crystal_length)
        .meta("points", points)
        .meta("log_base", p.log_base);
}

pub fn figure(req: &FigureRequest, params: &ExperimentParams) -> Result<Table> {
    req.validate()?;
    let n = req.points;
    let o = &req.overrides;
    let base = params.scales()?;
    match req.id {
        FigureId::Fig1 => {
            let sigma = derive_sigma(params.lambda_p, params.crystal_length)?;
            let at = |k: f64| {
                ExperimentParams {
                    omega: k * sigma,
                    ..*params
                }
                .scales()
            };
            let (s5, s10) = (at(5.0)?, at(10.0)?);
            let mut t = Table::new(
                "biphoton Gouy phase vs propagation distance",
                &["z_m", "zeta_omega5sigma_rad", "zeta_omega10sigma_rad"],
            );
            common_meta(&mut t, params, n);
            t.meta("sigma_m", sigma).meta("z_range_m", "[-1, 1] linear");
            for z in linspace(-1.0, 1.0, n) {
                t.push(vec![z, gouy_free(z, &s5), gouy_free(z, &s10)]);
            }
            Ok(t)
        }
        FigureId::Fig2a | FigureId::Fig2b => {
            let (lo, hi) = if req.id == FigureId::Fig2a {
                (0.01, 1.0)
            } else {
                (1.0, 100.0)
            };
            let z0m = o.z0_minus.unwrap_or(base.z0_minus);
            let mut t = Table::new(
                "log negativity and log sqrt(K) vs z0+/z0-",
                &["ratio_z0p_over_z0m", "log_negativity", "log_sqrt_schmidt"],
            );
            t.log_x = true;
            common_meta(&mut t, params, n);
            t.meta("z0_minus_m", z0m)
                .meta("ratio_range", format!("[{lo}, {hi}] log"));
            for r in log_grid(lo, hi, n) {
                let s = DerivedScales::from_rayleigh(base.k0, r * z0m, z0m)?;
                let en = log_negativity(&s, params.log_base);
                let k = params.log_base.log(schmidt_number_closed(&s).sqrt());
                t.push(vec![r, en, k]);
            }
            Ok(t)
        }
        FigureId::Fig3a | FigureId::Fig3b | FigureId::Fig3c | FigureId::Fig3d => {
            let (lo, hi) = match req.id {
                FigureId::Fig3a | FigureId::Fig3b => (0.01, 1.0),
                _ => (1.0, 20.0),
            };
            let negativity = matches!(req.id, FigureId::Fig3a | FigureId::Fig3c);
            let z0m = o.z0_minus.unwrap_or(1.2e-3);
            let z = o.z.unwrap_or(20e-3);
            let ordinate = if negativity {
                "log_negativity"
            } else {
                "zeta_rad"
            };
            let title = if negativity {
                "log negativity (covariance pipeline) vs z0+/z0- at fixed z"
            } else {
                "biphoton Gouy phase vs z0+/z0- at fixed z"
            };
            let mut t = Table::new(title, &["ratio_z0p_over_z0m", ordinate]);
            t.log_x = true;
            common_meta(&mut t, params, n);
            t.meta("z0_minus_m", z0m)
                .meta("z_m", z)
                .meta("ratio_range", format!("[{lo}, {hi}] log"));
            for r in log_grid(lo, hi, n) {
                let s = DerivedScales::from_rayleigh(base.k0, r * z0m, z0m)?;
                let y = if negativity {
                    log_negativity_from_spectrum(&pt_spectrum(&moments(&s, z))?, params.log_base)
                } else {
                    gouy_free(z, &s)
                };
                t.push(vec![r, y]);
            }
            Ok(t)
        }
        FigureId::Fig4 => {
            let z0m = o.z0_minus.unwrap_or(1.2e-3);
            let (f, z) = (o.f.unwrap_or(3e-3), o.z.unwrap_or(7e-3));
            let s = DerivedScales::from_rayleigh(base.k0, z0m, z0m)?;
            let mut t = Table::new(
                "focused biphoton Gouy phase vs distance after the lens",
                &[
                    "z_prime_m",
                    "zeta_rad",
                    "zeta_continuous_rad",
                    "zeta_ray_matrix_rad",
                ],
            );
            common_meta(&mut t, params, n);
            t.meta("z0_plus_m", z0m)
                .meta("z0_minus_m", z0m)
                .meta("f_m", f)
                .meta("z_m", z)
                .meta("c_scale", params.c_scale)
                .meta("z_prime_range_m", "[0, 0.012] linear");
            let setup = LensSetup::new(f, z, 0.0)?.with_c_scale(params.c_scale)?;
            for zp in linspace(0.0, 12e-3, n) {
                let l = setup.with_z_prime(zp)?;
                t.push(vec![
                    zp,
                    gouy_lens(&l, &s),
                    gouy_lens_continuous(&l, &s),
                    gouy_lens_exact(&l, &s),
                ]);
            }
            Ok(t)
        }
        FigureId::Fig5 => {
            let data = o.data.as_ref().expect("validated");
            let mut p = FitModelParams::published();
            if let Some(z) = o.z {
                p.z = z;
            }
            if let Some(f) = o.f {
                p.f = f;
            }
            if let Some(z0m) = o.z0_minus {
                p.z0_minus = z0m;
            }
            let mut t = Table::new(
                "measured Gouy phase vs shifted z0+ with model overlay",
                &["z0_plus_mm", "zeta_rad", "zeta_model_rad"],
            );
            t.meta("zeta0_rad", p.zeta0)
                .meta("z_f_m", p.z_f)
                .meta("z_m", p.z)
                .meta("z_prime_m", p.z_prime)
                .meta("f_m", p.f)
                .meta("z0_minus_m", p.z0_minus)
                .meta("rows", data.rows.len());
            for r in &data.rows {
                let model = fit_model(r.z0p, &p).unwrap_or(f64::NAN);
                t.push(vec![r.z0p * 1e3, r.zeta, model]);
            }
            Ok(t)
        }
        FigureId::Fig6 => {
            let published = FitModelParams::published();
            let (f, z) = (o.f.unwrap_or(published.f), o.z.unwrap_or(published.z));
            let z0m = o.z0_minus.unwrap_or(published.z0_minus);
            let mut t = Table::new(
                "post-lens waist position vs z0+",
                &["z0_plus_m", "waist_position_m"],
            );
            t.log_x = true;
            common_meta(&mut t, params, n);
            t.meta("f_m", f)
                .meta("z_m", z)
                .meta("z0_minus_m", z0m)
                .meta("c_scale", params.c_scale)
                .meta("z0_plus_range_m", "[0.001, 10] log");
            let setup = LensSetup::new(f, z, 0.0)?.with_c_scale(params.c_scale)?;
            for z0p in log_grid(1e-3, 10.0, n) {
                let s = DerivedScales::from_rayleigh(base.k0, z0p, z0m)?;
                t.push(vec![z0p, waist_position(&setup, &s)?]);
            }
            Ok(t)
        }
    }
}
