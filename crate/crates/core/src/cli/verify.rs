//! Oracle-versus-closed-form self check behind `biphoton verify`.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use crate::entangle::{
    log_negativity, log_negativity_from_spectrum, moment_set, moments, pt_spectrum, schmidt_number,
};
use crate::error::Result;
use crate::freeprop::{gouy_free, BeamGeometry};
use crate::lens::{focused_geometry, gouy_lens, gouy_lens_exact, waist_position, LensSetup};
use crate::oracle::{
    gaussian_moments, on_axis_phase, propagate_1d, propagate_lens_1d, QuadratureSpec,
};
use crate::params::{ExperimentParams, LogBase};

const PHASE_TOL: f64 = 1e-5;
const MOMENT_TOL: f64 = 1e-9;
const WAIST_TOL: f64 = 1e-4;
const NEGATIVITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render(&self) -> String {
        let mut out = format!("{:<26} {:<6} {}\n", "check", "status", "detail");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{:<26} {:<6} {}",
                c.name,
                if c.pass { "PASS" } else { "FAIL" },
                c.detail
            );
        }
        let passed = self.checks.iter().filter(|c| c.pass).count();
        let _ = writeln!(out, "{passed}/{} checks passed", self.checks.len());
        out
    }
}

fn phase_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn golden_argmin(mut a: f64, mut b: f64, g: impl Fn(f64) -> f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let (c, d) = (b - r * (b - a), a + r * (b - a));
        if g(c) < g(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

/// Runs each check, turning library errors into failures named after the
/// check rather than aborting the suite.
pub fn run(params: &ExperimentParams) -> Result<Report> {
    let s = params.scales()?;
    // Nested lens quadrature costs n²; 1024 nodes keep it well under a second.
    let spec = QuadratureSpec {
        n_points: 1024,
        ..QuadratureSpec::default()
    };
    let mut checks = Vec::new();
    let mut add = |name: &'static str, r: Result<(bool, String)>| {
        let (pass, detail) = r.unwrap_or_else(|e| (false, format!("error: {e}")));
        checks.push(Check { name, pass, detail });
    };

    let zs = [
        0.5 * s.z0_minus,
        s.z0_minus,
        10.0 * s.z0_minus,
        s.z0_plus,
        -3.0 * s.z0_plus,
    ];
    add(
        "free-space Gouy phase",
        (|| {
            let mut worst = 0.0f64;
            for &z in &zs {
                let r = propagate_1d(s.omega, z, s.k0, &spec, 0.0)?;
                let q = propagate_1d(s.sigma, z, s.k0, &spec, 0.0)?;
                worst = worst.max(phase_gap(on_axis_phase(r * q), -gouy_free(z, &s)));
            }
            Ok((
                worst < PHASE_TOL,
                format!("max |Δζ| = {worst:.1e} rad over {} z", zs.len()),
            ))
        })(),
    );

    let f = params.focal_length.unwrap_or(3e-3);
    add(
        "lens Gouy phase",
        (|| {
            let z = 2.0 * f + s.z0_minus;
            let mut worst = 0.0f64;
            for zp in [0.5 * f, 3.0 * f] {
                let r = propagate_lens_1d(s.omega, z, f, zp, s.k0, &spec, 0.0)?;
                let q = propagate_lens_1d(s.sigma, z, f, zp, s.k0, &spec, 0.0)?;
                let l = LensSetup::new(f, z, zp)?;
                worst = worst.max(phase_gap(on_axis_phase(r * q), -gouy_lens_exact(&l, &s)));
            }
            let zero = gouy_lens(&LensSetup::new(f, z, 2.0 * f)?, &s);
            let pass = worst < PHASE_TOL && zero == 0.0;
            Ok((
                pass,
                format!("max |Δζ| = {worst:.1e} rad; ζ(2f) = {zero:e}"),
            ))
        })(),
    );

    add(
        "second moments",
        (|| {
            let mut worst = 0.0f64;
            for &z in &zs {
                let a = gaussian_moments(&s, z);
                let b = moment_set(&s, z);
                let xs = a.x1_sq.abs();
                let ps = a.p1_sq.abs();
                let xps = a.sigma_xp.abs().max(a.x1p2.abs()).max(1e-300);
                for (u, v, scale) in [
                    (a.x1_sq, b.x1_sq, xs),
                    (a.x1x2, b.x1x2, xs),
                    (a.p1_sq, b.p1_sq, ps),
                    (a.p1p2, b.p1p2, ps),
                    (a.x1p2, b.x1p2, xps),
                    (a.sigma_xp, b.sigma_xp, xps),
                ] {
                    worst = worst.max((u - v).abs() / scale);
                }
            }
            Ok((worst < MOMENT_TOL, format!("max relative Δ = {worst:.1e}")))
        })(),
    );

    add(
        "waist position",
        (|| {
            let z = s.z0_plus;
            let r = BeamGeometry::at(z, &s).r_plus;
            let f = 0.25 * params.c_scale * r;
            let setup = LensSetup::new(f, z, 1.0)?.with_c_scale(params.c_scale)?;
            let zw = waist_position(&setup, &s)?;
            let b2 = |zp: f64| {
                setup
                    .with_z_prime(zp)
                    .and_then(|l| focused_geometry(&l, &s))
                    .map(|g| g.b_plus * g.b_plus)
                    .unwrap_or(f64::INFINITY)
            };
            let num = golden_argmin(1e-9 * zw, 10.0 * zw, b2);
            let rel = ((zw - num) / num).abs();
            Ok((
                rel < WAIST_TOL,
                format!("relative Δ = {rel:.1e} (c_scale = {})", params.c_scale),
            ))
        })(),
    );

    add(
        "Schmidt identity",
        (|| {
            for &z in &zs {
                schmidt_number(&s, z)?;
            }
            Ok((
                true,
                format!("propagated = closed to 1e-9 over {} z", zs.len()),
            ))
        })(),
    );

    add(
        "negativity z-independence",
        (|| {
            let base = LogBase::Natural;
            let closed = log_negativity(&s, base);
            let mut worst = 0.0f64;
            for k in [0.0, 1.0, -1.0, 10.0, -10.0, 100.0, -100.0] {
                let en =
                    log_negativity_from_spectrum(&pt_spectrum(&moments(&s, k * s.z0_minus))?, base);
                worst = worst.max((en - closed).abs());
            }
            Ok((
                worst < NEGATIVITY_TOL,
                format!("max |ΔE_N| = {worst:.1e} (E_N = {closed:.6})"),
            ))
        })(),
    );

    Ok(Report { checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_passes() {
        let r = run(&ExperimentParams::reference(5.0)).unwrap();
        assert!(r.all_pass(), "{}", r.render());
        assert!(r.render().ends_with("6/6 checks passed\n"));
    }

    #[test]
    fn c_scale_two_still_passes() {
        let p = ExperimentParams::reference(5.0).with_c_scale(2.0).unwrap();
        let r = run(&p).unwrap();
        assert!(r.all_pass(), "{}", r.render());
    }
}
