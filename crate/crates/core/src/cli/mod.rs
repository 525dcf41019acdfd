//! `biphoton` command line: derived scales, point evaluations, figure data,
//! fitting and the oracle self-check.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage/config/parse error,
//! 3 fit did not converge.

pub mod figures;
pub mod svg;
pub mod table;
pub mod verify;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::entangle::{
    log_negativity, log_negativity_from_spectrum, moments, pt_spectrum, schmidt_number_closed,
    schmidt_number_propagated,
};
use crate::error::Error;
use crate::fit::{fit, DataSet, DEFAULT_TOL};
use crate::freeprop::{gouy_free, gouy_free_single_arctan, BeamGeometry};
use crate::lens::{
    focused_geometry, waist_position, waist_position_printed, FitModelParams, LensSetup,
};
use crate::params::{parse_length, Config, ExperimentParams};

pub use figures::{figure, FigureId, FigureOverrides, FigureRequest};
pub use table::Table;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;

fn length(s: &str) -> Result<f64, String> {
    parse_length(s)
}

#[derive(Debug, Parser)]
#[command(
    name = "biphoton",
    version,
    about = "Double-Gaussian SPDC biphoton: Gouy phase, entanglement, focusing, fitting"
)]
pub struct Cli {
    /// key = value parameter file (lambda, lambda_p, L_p, Omega; optional f, c_scale, log_base).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file. For `figure` the CSV path, for `fit` the result file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Grid points for figure sweeps (at least 50).
    #[arg(long, global = true, default_value_t = figures::DEFAULT_POINTS)]
    pub points: usize,
    /// Also write an SVG rendering next to each figure CSV.
    #[arg(long, global = true)]
    pub svg: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print σ, k₀ and the Rayleigh lengths.
    Derive,
    /// Write the data behind one figure as CSV.
    Figure {
        id: FigureId,
        /// Measured (z0_plus_mm, zeta_rad) CSV, required by fig5.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long, value_parser = length)]
        z: Option<f64>,
        #[arg(long, value_parser = length)]
        f: Option<f64>,
        #[arg(long = "z0-minus", value_parser = length)]
        z0_minus: Option<f64>,
    },
    /// Run the quadrature oracle against every closed form.
    Verify,
    /// Fit ζ₀ and z_f of the two-dimensional Gouy model to measured data.
    Fit {
        #[arg(long)]
        data: PathBuf,
        #[arg(long = "init-zeta0", default_value_t = 1.68)]
        init_zeta0: f64,
        #[arg(long = "init-zf", value_parser = length, default_value = "7.15mm")]
        init_zf: f64,
        #[arg(long, value_parser = length)]
        z: Option<f64>,
        #[arg(long, value_parser = length)]
        zprime: Option<f64>,
        #[arg(long, value_parser = length)]
        f: Option<f64>,
        #[arg(long = "z0-minus", value_parser = length)]
        z0_minus: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Free-space Gouy phase at one distance.
    Gouy {
        #[arg(long, value_parser = length)]
        z: f64,
    },
    /// Entanglement measures at one distance.
    Entangle {
        #[arg(long, value_parser = length, default_value = "0")]
        z: f64,
    },
    /// Focused widths, radii and Gouy phase at z′ after a lens placed at z.
    Lens {
        #[arg(long, value_parser = length)]
        zprime: f64,
        #[arg(long, value_parser = length, default_value = "0")]
        z: f64,
        /// Focal length; falls back to `f` from the config.
        #[arg(long, value_parser = length)]
        f: Option<f64>,
    },
    /// Post-lens waist position of the plus mode.
    Waist {
        #[arg(long, value_parser = length, default_value = "0")]
        z: f64,
        #[arg(long, value_parser = length)]
        f: Option<f64>,
    },
}

/// A failure with its exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::Parse { .. } | Error::MissingKeys(_) | Error::Domain { .. } | Error::Data(_) => {
                EXIT_USAGE
            }
            _ => EXIT_FAILURE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<String, Failure>;

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Normal output goes to stdout, diagnostics to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(stdout) => {
            print!("{stdout}");
            EXIT_OK
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

pub fn load_params(config: Option<&Path>) -> Result<ExperimentParams, Failure> {
    match config {
        None => Ok(ExperimentParams::reference(5.0)),
        Some(p) => match Config::load(p) {
            Ok(c) => Ok(c.params),
            Err(Error::Io(msg)) => Err(Failure::usage(format!("{}: {msg}", p.display()))),
            Err(e) => Err(Failure::usage(format!("{}: {e}", p.display()))),
        },
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure {
        code: EXIT_FAILURE,
        message: format!("cannot write {}: {e}", path.display()),
    })
}

fn load_data(path: &Path) -> Result<DataSet, Failure> {
    DataSet::load(path).map_err(|e| match e {
        Error::Io(msg) => Failure::usage(format!("{}: {msg}", path.display())),
        e => Failure::usage(format!("{}: {e}", path.display())),
    })
}

/// Text commands print their report and also save it when `--out` is given.
fn emit(cli: &Cli, report: String) -> Outcome {
    if let Some(out) = &cli.out {
        write_file(out, &report)?;
    }
    Ok(report)
}

fn focal(flag: Option<f64>, params: &ExperimentParams) -> Result<f64, Failure> {
    flag.or(params.focal_length)
        .ok_or_else(|| Failure::usage("focal length required: pass --f or set `f` in the config"))
}

pub fn execute(cli: &Cli) -> Outcome {
    let params = load_params(cli.config.as_deref())?;
    match &cli.command {
        Command::Derive => emit(cli, derive_report(&params)?),
        Command::Figure {
            id,
            data,
            z,
            f,
            z0_minus,
        } => {
            let data = data.as_deref().map(load_data).transpose()?;
            let req = FigureRequest {
                id: *id,
                points: cli.points,
                overrides: FigureOverrides {
                    z: *z,
                    f: *f,
                    z0_minus: *z0_minus,
                    data,
                },
            };
            let table = figure(&req, &params)?;
            let out = cli
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from(format!("{id}.csv")));
            write_file(&out, &table.to_csv())?;
            let mut msg = format!("wrote {} ({} rows)\n", out.display(), table.rows.len());
            if cli.svg {
                let svg_path = out.with_extension("svg");
                write_file(&svg_path, &svg::render(&table))?;
                let _ = writeln!(msg, "wrote {}", svg_path.display());
            }
            Ok(msg)
        }
        Command::Verify => {
            let report = verify::run(&params)?;
            let text = report.render();
            if let Some(out) = &cli.out {
                write_file(out, &text)?;
            }
            if report.all_pass() {
                Ok(text)
            } else {
                print!("{text}");
                let failed: Vec<&str> = report
                    .checks
                    .iter()
                    .filter(|c| !c.pass)
                    .map(|c| c.name)
                    .collect();
                Err(Failure {
                    code: EXIT_FAILURE,
                    message: format!("failed: {}", failed.join(", ")),
                })
            }
        }
        Command::Fit {
            data,
            init_zeta0,
            init_zf,
            z,
            zprime,
            f,
            z0_minus,
            tol,
        } => {
            let dataset = load_data(data)?;
            let mut fixed = FitModelParams::published();
            fixed.z = z.unwrap_or(fixed.z);
            fixed.z_prime = zprime.unwrap_or(fixed.z_prime);
            fixed.f = f.unwrap_or(fixed.f);
            fixed.z0_minus = z0_minus.unwrap_or(fixed.z0_minus);
            let result = fit(&dataset, &fixed, (*init_zeta0, *init_zf), *tol)?;
            let out = cli
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from("fit_result.txt"));
            let stem = out
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let res_path = out.with_file_name(format!("{stem}_residuals.csv"));
            let arrangement = format!(
                "z_m={}\nz_prime_m={}\nf_m={}\nz0_minus_m={}\n",
                fixed.z, fixed.z_prime, fixed.f, fixed.z0_minus
            );
            write_file(&out, &(result.to_key_value() + &arrangement))?;
            let residuals = format!(
                "# fit residuals\n# zeta0_rad = {}\n# z_f_m = {}\n# z_m = {}\n# z_prime_m = {}\n# f_m = {}\n# z0_minus_m = {}\n{}",
                result.zeta0,
                result.z_f,
                fixed.z,
                fixed.z_prime,
                fixed.f,
                fixed.z0_minus,
                result.residuals_csv(&dataset)
            );
            write_file(&res_path, &residuals)?;
            let summary = format!(
                "zeta0 = {:.6} rad\nz_f   = {:.6} mm\nrss   = {:.3e} over {} points\n{}\nwrote {} and {}\n",
                result.zeta0,
                result.z_f * 1e3,
                result.rss,
                dataset.rows.len(),
                result.message,
                out.display(),
                res_path.display()
            );
            if result.converged {
                Ok(summary)
            } else {
                print!("{summary}");
                Err(Failure {
                    code: EXIT_NO_CONVERGENCE,
                    message: format!(
                        "fit did not converge after {} iterations ({} evaluations): {}",
                        result.iterations, result.evaluations, result.message
                    ),
                })
            }
        }
        Command::Gouy { z } => {
            let s = params.scales()?;
            let g = BeamGeometry::at(*z, &s);
            emit(
                cli,
                format!(
                    "z_m={}\nzeta_rad={}\nzeta_single_arctan_rad={}\nw_plus_m={}\nw_minus_m={}\n",
                    z,
                    gouy_free(*z, &s),
                    gouy_free_single_arctan(*z, &s),
                    g.w_plus,
                    g.w_minus
                ),
            )
        }
        Command::Entangle { z } => {
            let s = params.scales()?;
            let base = params.log_base;
            let spectrum = pt_spectrum(&moments(&s, *z))?;
            let k = schmidt_number_closed(&s);
            let en = log_negativity(&s, base);
            let log_sqrt_k = base.log(k.sqrt());
            emit(
                cli,
                format!(
                    "z_m={}\nlog_base={}\nlog_negativity={}\nlog_negativity_pipeline={}\nnu_1={}\nnu_2={}\nschmidt_number={}\nschmidt_number_propagated={}\nlog_sqrt_schmidt={}\ngap={}\n",
                    z,
                    base,
                    en,
                    log_negativity_from_spectrum(&spectrum, base),
                    spectrum.nu_1,
                    spectrum.nu_2,
                    k,
                    schmidt_number_propagated(&s, *z),
                    log_sqrt_k,
                    log_sqrt_k - en
                ),
            )
        }
        Command::Lens { zprime, z, f } => {
            let s = params.scales()?;
            let setup =
                LensSetup::new(focal(*f, &params)?, *z, *zprime)?.with_c_scale(params.c_scale)?;
            let g = focused_geometry(&setup, &s)?;
            emit(
                cli,
                format!(
                    "f_m={}\nz_m={}\nz_prime_m={}\nc_scale={}\nu_m={}\nb_plus_m={}\nb_minus_m={}\nr_plus_printed={}\nr_minus_printed={}\ninv_cr_plus_per_m={}\ninv_cr_minus_per_m={}\nzeta_rad={}\nzeta_continuous_rad={}\nzeta_ray_matrix_rad={}\n",
                    setup.f,
                    setup.z,
                    setup.z_prime,
                    setup.c_scale,
                    setup.u(),
                    g.b_plus,
                    g.b_minus,
                    g.r_plus_printed,
                    g.r_minus_printed,
                    g.inv_cr_plus,
                    g.inv_cr_minus,
                    g.zeta_printed,
                    g.zeta,
                    g.zeta_exact
                ),
            )
        }
        Command::Waist { z, f } => {
            let s = params.scales()?;
            let setup =
                LensSetup::new(focal(*f, &params)?, *z, 0.0)?.with_c_scale(params.c_scale)?;
            let mut text = format!(
                "f_m={}\nz_m={}\nc_scale={}\nwaist_position_m={}\n",
                setup.f,
                setup.z,
                setup.c_scale,
                waist_position(&setup, &s)?
            );
            if let Ok(p) = waist_position_printed(&setup, &s) {
                let _ = writeln!(text, "waist_position_printed_m={p}");
            }
            emit(cli, text)
        }
    }
}

fn derive_report(p: &ExperimentParams) -> Result<String, Failure> {
    let s = p.scales()?;
    let mut out = String::new();
    let _ = writeln!(out, "sigma    = {:.4} μm", s.sigma * 1e6);
    let _ = writeln!(
        out,
        "Omega    = {:.4} μm ({:.4} sigma)",
        s.omega * 1e6,
        s.omega / s.sigma
    );
    let _ = writeln!(out, "k0       = {:.6e} rad/m", s.k0);
    let _ = writeln!(out, "z0_plus  = {:.6} mm", s.z0_plus * 1e3);
    let _ = writeln!(out, "z0_minus = {:.6} mm", s.z0_minus * 1e3);
    out.push('\n');
    let _ = writeln!(out, "sigma_m={}", s.sigma);
    let _ = writeln!(out, "omega_m={}", s.omega);
    let _ = writeln!(out, "k0_per_m={}", s.k0);
    let _ = writeln!(out, "z0_plus_m={}", s.z0_plus);
    let _ = writeln!(out, "z0_minus_m={}", s.z0_minus);
    Ok(out)
}
