//! Thin-lens focusing of the biphoton: focused widths and radii, the focused
//! Gouy phase, the Gouy-phase fit model and the post-lens waist position.
//!
//! The propagation kernel has no ½ in its exponent, so the lens phase
//! exp(−ik₀x²/2f) acts like a lens of focal length 2f and the lens law reads
//! 1/z′ + 1/(c·r) − 1/(2f). Geometry: source → z → lens → z′ → observer.

use std::f64::consts::{PI, TAU};

use crate::error::{positive, Error, Result};
use crate::freeprop::BeamGeometry;
use crate::params::DerivedScales;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LensSetup {
    pub f: f64,
    /// Crystal to lens.
    pub z: f64,
    /// Lens to observation plane.
    pub z_prime: f64,
    pub c_scale: f64,
}

impl LensSetup {
    pub fn new(f: f64, z: f64, z_prime: f64) -> Result<LensSetup> {
        LensSetup {
            f,
            z,
            z_prime,
            c_scale: 1.0,
        }
        .validated()
    }

    pub fn with_c_scale(mut self, c: f64) -> Result<LensSetup> {
        self.c_scale = c;
        self.validated()
    }

    pub fn with_z_prime(mut self, z_prime: f64) -> Result<LensSetup> {
        self.z_prime = z_prime;
        self.validated()
    }

    fn validated(self) -> Result<LensSetup> {
        positive("f", self.f)?;
        positive("c_scale", self.c_scale)?;
        if !(self.z >= 0.0 && self.z.is_finite()) {
            return Err(Error::Domain {
                field: "z",
                value: self.z,
            });
        }
        if !(self.z_prime >= 0.0 && self.z_prime.is_finite()) {
            return Err(Error::Domain {
                field: "z_prime",
                value: self.z_prime,
            });
        }
        Ok(self)
    }

    /// 1 − z′/2f.
    fn dn(&self) -> f64 {
        1.0 - self.z_prime / (2.0 * self.f)
    }

    /// Numerator of u = z/(1 − z′/2f) + z′ after clearing the pole: u = N/Dn.
    fn n(&self) -> f64 {
        self.z + self.z_prime * self.dn()
    }

    /// u = z/(1 − z′/2f) + z′; infinite at z′ = 2f.
    pub fn u(&self) -> f64 {
        self.n() / self.dn()
    }
}

/// Widths, radii and phases after the lens.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FocusedGeometry {
    pub b_plus: f64,
    pub b_minus: f64,
    /// R± exactly as printed. Their denominators mix 1/length² with
    /// 1/length⁴, so they are only meaningful as transcribed numbers.
    pub r_plus_printed: f64,
    pub r_minus_printed: f64,
    /// 1/(c·R±) from the complex beam parameter, the curvature that actually
    /// multiplies k₀r² in the focused wavefunction.
    pub inv_cr_plus: f64,
    pub inv_cr_minus: f64,
    /// Continuous branch, see [`gouy_lens_continuous`].
    pub zeta: f64,
    /// Principal branch of the printed arctan, see [`gouy_lens`].
    pub zeta_printed: f64,
    pub zeta_exact: f64,
}

struct Mode {
    w: f64,
    inv_r: f64,
    w0: f64,
}

fn focus_mode(m: &Mode, setup: &LensSetup, k0: f64) -> (f64, f64, f64) {
    let zp = setup.z_prime;
    let c = setup.c_scale;
    let inv_w2 = 1.0 / (m.w * m.w);
    let d = 1.0 / zp + m.inv_r / c - 1.0 / (2.0 * setup.f);
    let num = inv_w2 * inv_w2 + k0 * k0 * d * d;
    let lambda = TAU / k0;
    let b2 = num / ((TAU / (lambda * zp)).powi(2) * inv_w2);
    let z_over_cr = setup.z * m.inv_r / c;
    let r_printed = num
        / (c / (zp * m.w * m.w) * (1.0 + (setup.z / zp + z_over_cr) / (m.w0 * m.w0))
            - PI / (lambda * setup.f));
    let inv_cr = 1.0 / zp - k0 * k0 * d / (zp * zp * num);
    (b2.sqrt(), r_printed, inv_cr)
}

pub fn focused_geometry(setup: &LensSetup, scales: &DerivedScales) -> Result<FocusedGeometry> {
    if setup.z_prime == 0.0 {
        return Err(Error::Singular(
            "z' = 0: focused widths diverge at the lens plane".into(),
        ));
    }
    let g = BeamGeometry::at(setup.z, scales);
    let plus = Mode {
        w: g.w_plus,
        inv_r: g.inv_r_plus(),
        w0: scales.omega,
    };
    let minus = Mode {
        w: g.w_minus,
        inv_r: g.inv_r_minus(),
        w0: scales.sigma,
    };
    let (b_plus, r_plus_printed, inv_cr_plus) = focus_mode(&plus, setup, scales.k0);
    let (b_minus, r_minus_printed, inv_cr_minus) = focus_mode(&minus, setup, scales.k0);
    Ok(FocusedGeometry {
        b_plus,
        b_minus,
        r_plus_printed,
        r_minus_printed,
        inv_cr_plus,
        inv_cr_minus,
        zeta: gouy_lens_continuous(setup, scales),
        zeta_printed: gouy_lens(setup, scales),
        zeta_exact: gouy_lens_exact(setup, scales),
    })
}

/// ½·arctan{u(1/z0₊ + 1/z0₋) / (1 − u²/(z0₊z0₋))}, principal branch.
///
/// Numerator and denominator are multiplied by (1 − z′/2f)² so the pole at
/// z′ = 2f disappears; there the value is exactly 0.
pub fn gouy_lens(setup: &LensSetup, scales: &DerivedScales) -> f64 {
    let (dn, n) = (setup.dn(), setup.n());
    let s = 1.0 / scales.z0_plus + 1.0 / scales.z0_minus;
    let p = 1.0 / (scales.z0_plus * scales.z0_minus);
    let num = n * dn * s;
    let den = dn * dn - n * n * p;
    if num == 0.0 && den == 0.0 {
        return 0.0;
    }
    // `+ 0.0` turns the −0 produced at z′ = 2f (den < 0) into +0.
    0.5 * (num / den).atan() + 0.0
}

/// ½[arctan(u/z0₊) + arctan(u/z0₋)] lifted continuously through z′ = 2f,
/// where it passes π/2. Each term is arg(Dn·z0 + iN) on [0, 2π).
pub fn gouy_lens_continuous(setup: &LensSetup, scales: &DerivedScales) -> f64 {
    let (dn, n) = (setup.dn(), setup.n());
    0.5 * [scales.z0_plus, scales.z0_minus]
        .iter()
        .map(|&z0| n.atan2(dn * z0).rem_euclid(TAU))
        .sum::<f64>()
}

/// On-axis phase of the lensed state from the ray matrix of z → lens → z′:
/// ½Σ± arg(A·z0± + iB) with A = 1 − z′/2f and B = z + z′(1 − z/2f).
/// This is what the quadrature oracle reproduces.
pub fn gouy_lens_exact(setup: &LensSetup, scales: &DerivedScales) -> f64 {
    let a = setup.dn();
    let b = setup.z + setup.z_prime * (1.0 - setup.z / (2.0 * setup.f));
    0.5 * [scales.z0_plus, scales.z0_minus]
        .iter()
        .map(|&z0| b.atan2(a * z0).rem_euclid(TAU))
        .sum::<f64>()
}

/// Parameters of the two-dimensional Gouy-phase fit model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitModelParams {
    pub zeta0: f64,
    pub z_f: f64,
    pub z: f64,
    pub z_prime: f64,
    pub f: f64,
    pub z0_minus: f64,
}

impl FitModelParams {
    /// The published fit result (ζ₀ = 1.68 rad, z_f = 7.15 mm) and arrangement.
    pub fn published() -> FitModelParams {
        FitModelParams {
            zeta0: 1.68,
            z_f: 7.15e-3,
            z: 0.5,
            z_prime: 1.4653,
            f: 0.2,
            z0_minus: 1.2e-3,
        }
    }

    /// u = z/(1 − z′/2f) + z′.
    pub fn u(&self) -> f64 {
        self.z / (1.0 - self.z_prime / (2.0 * self.f)) + self.z_prime
    }
}

/// ζ₀ + arctan(u/(z′₀₊ − z_f)) + arctan(u/z0₋).
///
/// Equal modulo π to the printed single arctan
/// ζ₀ + arctan{u(1/a + 1/z0₋)/(1 − u²/(a·z0₋))}, a = z′₀₊ − z_f, but without
/// its branch jump where u² = a·z0₋. The one genuine discontinuity left is
/// the π step at a = 0.
pub fn fit_model(z0p_shifted: f64, params: &FitModelParams) -> Result<f64> {
    let a = z0p_shifted - params.z_f;
    if a == 0.0 {
        return Err(Error::Pole(format!("z'0+ = z_f = {}", params.z_f)));
    }
    let u = params.u();
    Ok(params.zeta0 + (u / a).atan() + (u / params.z0_minus).atan())
}

/// Post-lens position of the minimum of B₊, in the pole-free form obtained
/// by dividing numerator and denominator by (c·r₊)².
pub fn waist_position(setup: &LensSetup, scales: &DerivedScales) -> Result<f64> {
    let g = BeamGeometry::at(setup.z, scales);
    let f = setup.f;
    let k2w4 = (scales.k0 * g.w_plus * g.w_plus).powi(2);
    let t = 1.0 - 2.0 * f * g.inv_r_plus() / setup.c_scale;
    let den = k2w4 * t * t + 4.0 * f * f;
    if den == 0.0 || !den.is_finite() {
        return Err(Error::Singular(format!("waist denominator is {den}")));
    }
    Ok(2.0 * f * k2w4 * t / den)
}

/// Same quantity in the printed form 2ck₀²w₊⁴r₊(cr₊ − 2f)f / [k₀²w₊⁴(cr₊ − 2f)² + 4f²c²r₊²].
/// Undefined at z = 0 where r₊ is infinite.
pub fn waist_position_printed(setup: &LensSetup, scales: &DerivedScales) -> Result<f64> {
    let g = BeamGeometry::at(setup.z, scales);
    let (c, f, r) = (setup.c_scale, setup.f, g.r_plus);
    let k2w4 = (scales.k0 * g.w_plus * g.w_plus).powi(2);
    let den = k2w4 * (c * r - 2.0 * f).powi(2) + 4.0 * f * f * c * c * r * r;
    if den == 0.0 || !den.is_finite() {
        return Err(Error::Singular(format!("waist denominator is {den}")));
    }
    Ok(2.0 * c * k2w4 * r * (c * r - 2.0 * f) * f / den)
}
