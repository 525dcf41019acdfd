//! Independent numerical checks: direct quadrature of the Fresnel kernel
//! (free space and through the thin lens) and hand-derived Gaussian moment
//! integrals.
//!
//! The kernel is used verbatim, √(1/iλz)·exp(ik₀(x−x′)²/z), and so is the
//! lens transmittance exp(−ik₀x′²/2f). Nothing is completed to a square: the
//! integrand is sampled as is. It is entire in x′, so the real line may be
//! rotated onto the steepest-descent ray x′ = s·e^{iθ}, where the oscillation
//! turns into Gaussian decay and a few thousand trapezoid nodes suffice even
//! for z = z0/10⁶.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::entangle::MomentSet;
use crate::error::{positive, Error, Result};
use crate::params::DerivedScales;

/// Composite rule on equally spaced nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Spectrally accurate for the decaying entire integrands used here.
    #[default]
    Trapezoid,
    Simpson,
}

/// Integration path for the x′ integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Contour {
    #[default]
    SteepestDescent,
    /// The literal real line, ±half_width·max(w0, spread) wide, with nodes
    /// dense enough that the kernel phase advances < π/4 per node.
    RealAxis,
}

/// Prefactor of the propagator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelNorm {
    /// √(k₀/iπz), which conserves ∫|ψ|² for the exponent ik₀(x−x′)²/z.
    #[default]
    Unitary,
    /// √(1/iλz) as printed; 1/√2 of the unitary value, so each pass
    /// halves the norm.
    Verbatim,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Window half-width in units of the natural width of the integrand.
    pub half_width: f64,
    /// Minimum node count per 1-D integral.
    pub n_points: usize,
    pub scheme: Scheme,
    pub contour: Contour,
    pub norm: KernelNorm,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            half_width: 12.0,
            n_points: 4096,
            scheme: Scheme::Trapezoid,
            contour: Contour::SteepestDescent,
            norm: KernelNorm::Unitary,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.half_width >= 8.0 && self.half_width.is_finite()) {
            return Err(Error::Domain {
                field: "half_width",
                value: self.half_width,
            });
        }
        if self.n_points < 512 || !self.n_points.is_multiple_of(2) {
            return Err(Error::Domain {
                field: "n_points",
                value: self.n_points as f64,
            });
        }
        Ok(())
    }
}

/// Relative change allowed between n and 2n nodes.
const DOUBLING_TOL: f64 = 1e-8;
const MAX_NODES: usize = 1 << 24;

/// Path for ∫ g(x′) dx′ with g(x′) = h(x′)·exp(−c·x′² − 2i·a·x·x′), h
/// slowly varying. `c` fixes the rotation and window, `a·x` the phase rate.
///
/// The steepest-descent path is the line x′ = x′ₛ + s·e^{iθ} through the
/// saddle x′ₛ = −i·a·x/c with θ = −arg(c)/2. On it the Gaussian factor is
/// real and decaying and the linear term vanishes, so neither oscillation
/// nor cancellation is left for the quadrature.
struct Line {
    origin: Complex64,
    theta: f64,
    half: f64,
    nodes: usize,
}

fn plan(c: Complex64, ax: Complex64, w_real: f64, spec: &QuadratureSpec) -> Result<Line> {
    let line = match spec.contour {
        Contour::SteepestDescent => {
            let origin = Complex64::new(0.0, -1.0) * ax / c;
            let half = spec.half_width / c.norm().sqrt();
            Line {
                origin,
                theta: -0.5 * c.arg(),
                half,
                nodes: node_count(0.0, half, spec),
            }
        }
        Contour::RealAxis => {
            // Decay scale on the real line is 1/√Re c; the kernel phase rate
            // at the window edge is |2(Im c)·x′ + 2a·x|.
            let decay = c.re.max(1e-300).recip().sqrt();
            let half = spec.half_width * decay.max(w_real);
            let rate = 2.0 * c.im.abs() * half + 2.0 * ax.norm();
            Line {
                origin: Complex64::new(0.0, 0.0),
                theta: 0.0,
                half,
                nodes: node_count(rate, half, spec),
            }
        }
    };
    if line.nodes > MAX_NODES {
        return Err(Error::Quadrature(format!(
            "{} nodes needed on a window of ±{:e}",
            line.nodes, line.half
        )));
    }
    Ok(line)
}

fn node_count(rate: f64, half: f64, spec: &QuadratureSpec) -> usize {
    let by_phase = (2.0 * half * rate / (PI / 4.0)).ceil() as usize;
    let n = spec.n_points.max(by_phase);
    n + n % 2
}

/// Integrates `g` along `line` with 2n intervals and checks it against the
/// n-interval estimate from every other node.
fn integrate(
    line: &Line,
    spec: &QuadratureSpec,
    mut g: impl FnMut(Complex64) -> Complex64,
) -> Result<Complex64> {
    let rot = Complex64::from_polar(1.0, line.theta);
    let m = 2 * line.nodes;
    let h = 2.0 * line.half / m as f64;
    let mut vals = Vec::with_capacity(m + 1);
    let mut mass = 0.0;
    for i in 0..=m {
        let s = -line.half + h * i as f64;
        let v = g(line.origin + rot * s) * rot;
        mass += v.norm();
        vals.push(v);
    }
    let fine = rule(&vals, 1, h, spec.scheme);
    let coarse = rule(&vals, 2, 2.0 * h, spec.scheme);
    let scale = fine.norm().max(mass * h);
    let change = (fine - coarse).norm() / scale;
    if !change.is_finite() || change > DOUBLING_TOL {
        return Err(Error::Quadrature(format!(
            "relative change {change:e} between {} and {m} intervals",
            m / 2
        )));
    }
    Ok(fine)
}

fn rule(vals: &[Complex64], stride: usize, h: f64, scheme: Scheme) -> Complex64 {
    let last = (vals.len() - 1) / stride;
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, v) in vals.iter().step_by(stride).enumerate() {
        let w = match scheme {
            Scheme::Trapezoid => {
                if i == 0 || i == last {
                    0.5
                } else {
                    1.0
                }
            }
            Scheme::Simpson => {
                if i == 0 || i == last {
                    1.0 / 3.0
                } else if i % 2 == 1 {
                    4.0 / 3.0
                } else {
                    2.0 / 3.0
                }
            }
        };
        acc += v * w;
    }
    acc * h
}

fn prefactor(k0: f64, z: f64, norm: KernelNorm) -> Complex64 {
    let lambda = 2.0 * PI / k0;
    let verbatim = (Complex64::new(0.0, lambda * z)).inv().sqrt();
    match norm {
        KernelNorm::Verbatim => verbatim,
        KernelNorm::Unitary => verbatim * 2f64.sqrt(),
    }
}

/// Exponent of K(x, x′; z) = √(1/iλz)·exp(ik₀(x−x′)²/z); exponents are
/// summed before a single exp.
fn kernel_exponent(x: Complex64, xp: Complex64, k0: f64, z: f64) -> Complex64 {
    let d = x - xp;
    Complex64::i() * (k0 / z) * d * d
}

/// ∫K(x, x′; z)·exp(−x′²/w0²) dx′ at x = `eval_at` (which may be complex,
/// for chaining). z = 0 returns the initial Gaussian.
pub fn propagate_1d(
    w0: f64,
    z: f64,
    k0: f64,
    spec: &QuadratureSpec,
    eval_at: f64,
) -> Result<Complex64> {
    propagate_complex(w0, z, k0, spec, Complex64::new(eval_at, 0.0))
}

fn propagate_complex(
    w0: f64,
    z: f64,
    k0: f64,
    spec: &QuadratureSpec,
    x: Complex64,
) -> Result<Complex64> {
    spec.validate()?;
    positive("w0", w0)?;
    positive("k0", k0)?;
    if z == 0.0 {
        return Ok((-x * x / (w0 * w0)).exp());
    }
    let a = k0 / z;
    let c = Complex64::new(1.0 / (w0 * w0), -a);
    let line = plan(c, x * a, w0, spec)?;
    let int = integrate(&line, spec, |xp| {
        (-xp * xp / (w0 * w0) + kernel_exponent(x, xp, k0, z)).exp()
    })?;
    Ok(prefactor(k0, z, spec.norm) * int)
}

/// Propagates exp(−x²/w0²) over z, applies exp(−ik₀x′²/2f) and propagates
/// over z′, evaluating at x = `eval_at`.
///
/// The second integral runs on its own steepest-descent ray, so the
/// lens-plane field is needed at complex points; it is computed there by
/// the first quadrature. The ray angle comes from a two-point probe of that
/// field, which is Gaussian: ψ(d)/ψ(0) = exp(−Q·d²).
pub fn propagate_lens_1d(
    w0: f64,
    z: f64,
    f: f64,
    z_prime: f64,
    k0: f64,
    spec: &QuadratureSpec,
    eval_at: f64,
) -> Result<Complex64> {
    positive("z", z)?;
    positive("f", f)?;
    positive("z_prime", z_prime)?;
    let stage1 = |xp: Complex64| propagate_complex(w0, z, k0, spec, xp);
    let d = w0;
    let psi0 = stage1(Complex64::new(0.0, 0.0))?;
    let psid = stage1(Complex64::new(d, 0.0))?;
    let q = -(psid / psi0).ln() / (d * d);
    let a2 = k0 / z_prime;
    let c2 = q + Complex64::new(0.0, k0 / (2.0 * f) - a2);
    let x = Complex64::new(eval_at, 0.0);
    let spread = 1.0 / q.re.max(1e-300).sqrt();
    let line = plan(c2, x * a2, spread, spec)?;
    let lens = Complex64::new(0.0, -k0 / (2.0 * f));
    let mut failure = None;
    let int = integrate(&line, spec, |xp| match stage1(xp) {
        Ok(v) => v * (lens * xp * xp + kernel_exponent(x, xp, k0, z_prime)).exp(),
        Err(e) => {
            failure.get_or_insert(e);
            Complex64::new(f64::NAN, 0.0)
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(prefactor(k0, z_prime, spec.norm) * int?)
}

/// arg ψ(0) of a propagated field: minus the per-coordinate Gouy phase.
pub fn on_axis_phase(amplitude: Complex64) -> f64 {
    amplitude.arg()
}

/// ∫|ψ(x)|² dx and 2√⟨x²⟩ of a field given pointwise, by composite Simpson
/// on ±`half` with `n` intervals.
pub fn norm_and_width(
    half: f64,
    n: usize,
    psi: impl Fn(f64) -> Result<Complex64>,
) -> Result<(f64, f64)> {
    let n = n + n % 2;
    let h = 2.0 * half / n as f64;
    let (mut m0, mut m2) = (0.0, 0.0);
    for i in 0..=n {
        let x = -half + h * i as f64;
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let p = psi(x)?.norm_sqr();
        m0 += w * p;
        m2 += w * p * x * x;
    }
    let (m0, m2) = (m0 * h / 3.0, m2 * h / 3.0);
    Ok((m0, 2.0 * (m2 / m0).sqrt()))
}

/// Second moments of the state, derived mode by mode from the complex
/// Gaussian exponent ψ ∝ exp(−A·s²), A = 1/w² − ik₀/r, of each relative
/// coordinate s ∈ {r, q}:
///
/// ⟨s²⟩ = 1/(4 Re A), ⟨p_s²⟩ = |A|²/Re A, ⟨s·p_s⟩_sym = −Im A/(2 Re A),
///
/// then mapped to photon coordinates with x₁,₂ = r ± q and p₁,₂ = (p_r ± p_q)/2.
pub fn gaussian_moments(scales: &DerivedScales, z: f64) -> MomentSet {
    let mode = |w0: f64, z0: f64| {
        let t = z / z0;
        let w2 = w0 * w0 * (1.0 + t * t);
        // 1/r = z/(z² + z0²), finite at the waist.
        let inv_r = z / (z * z + z0 * z0);
        let a = Complex64::new(1.0 / w2, -scales.k0 * inv_r);
        (
            1.0 / (4.0 * a.re),
            a.norm_sqr() / a.re,
            -a.im / (2.0 * a.re),
        )
    };
    let (rr, pr, sr) = mode(scales.omega, scales.z0_plus);
    let (qq, pq, sq) = mode(scales.sigma, scales.z0_minus);
    MomentSet {
        x1_sq: rr + qq,
        x1x2: rr - qq,
        p1_sq: 0.25 * (pr + pq),
        p1p2: 0.25 * (pr - pq),
        x1p2: 0.5 * (sr - sq),
        sigma_xp: 0.5 * (sr + sq),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entangle::moment_set;
    use crate::freeprop::{beam_width, gouy_free};
    use crate::lens::{gouy_lens, gouy_lens_exact, LensSetup};
    use crate::params::ExperimentParams;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_8, TAU};

    const K0: f64 = TAU / 702e-9;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn spec_validation() {
        assert!(spec().validate().is_ok());
        assert!(QuadratureSpec {
            half_width: 7.9,
            ..spec()
        }
        .validate()
        .is_err());
        assert!(QuadratureSpec {
            n_points: 511,
            ..spec()
        }
        .validate()
        .is_err());
        assert!(QuadratureSpec {
            n_points: 1001,
            ..spec()
        }
        .validate()
        .is_err());
        assert!(propagate_1d(
            1e-5,
            1e-3,
            K0,
            &QuadratureSpec {
                n_points: 100,
                ..spec()
            },
            0.0
        )
        .is_err());
    }

    #[test]
    fn phase_one_rayleigh_length_out() {
        let s = ExperimentParams::reference(5.0).scales().unwrap();
        let psi = propagate_1d(s.sigma, s.z0_minus, K0, &spec(), 0.0).unwrap();
        assert!((on_axis_phase(psi) + FRAC_PI_8).abs() < 1e-6);
    }

    #[test]
    fn real_axis_contour_agrees() {
        let w0 = 11.4e-6;
        let z0 = K0 * w0 * w0;
        let real = QuadratureSpec {
            contour: Contour::RealAxis,
            ..spec()
        };
        for (z, x) in [(0.3 * z0, 0.0), (z0, 1.5 * w0), (-2.0 * z0, -w0)] {
            let a = propagate_1d(w0, z, K0, &spec(), x).unwrap();
            let b = propagate_1d(w0, z, K0, &real, x).unwrap();
            assert!((a - b).norm() < 1e-9 * a.norm(), "z={z} {a} {b}");
        }
    }

    #[test]
    fn simpson_scheme_agrees() {
        let w0 = 20e-6;
        let simpson = QuadratureSpec {
            scheme: Scheme::Simpson,
            ..spec()
        };
        let a = propagate_1d(w0, 2e-3, K0, &spec(), 10e-6).unwrap();
        let b = propagate_1d(w0, 2e-3, K0, &simpson, 10e-6).unwrap();
        assert!((a - b).norm() < 1e-10 * a.norm());
    }

    #[test]
    fn verbatim_prefactor_reproduces_printed_amplitude() {
        // The printed amplitude at r = q = 0 is 1/√(4πw₊w₋); at z = 0 it is
        // reached only after rescaling by 1/√(4πΩσ), so compare ratios.
        let w0 = 15e-6;
        let z0 = K0 * w0 * w0;
        let verbatim = QuadratureSpec {
            norm: KernelNorm::Verbatim,
            ..spec()
        };
        let z = 0.7 * z0;
        let psi = propagate_1d(w0, z, K0, &verbatim, 0.0).unwrap();
        let w = beam_width(z, z0, w0).unwrap();
        assert_relative_eq!(
            psi.norm(),
            (w0 / w).sqrt() / 2f64.sqrt(),
            max_relative = 1e-9
        );
    }

    #[test]
    fn width_matches_beam_width() {
        let w0 = 12e-6;
        let z0 = K0 * w0 * w0;
        for z in [0.5 * z0, 3.0 * z0] {
            let w = beam_width(z, z0, w0).unwrap();
            let (_, width) =
                norm_and_width(8.0 * w, 600, |x| propagate_1d(w0, z, K0, &spec(), x)).unwrap();
            assert_relative_eq!(width, w, max_relative = 1e-5);
        }
    }

    #[test]
    fn tiny_distance_is_identity() {
        let w0 = 11.4e-6;
        let z0 = K0 * w0 * w0;
        for i in -20..=20 {
            let x = 0.15 * w0 * i as f64;
            let psi = propagate_1d(w0, z0 * 1e-6, K0, &spec(), x).unwrap();
            let g = (-x * x / (w0 * w0)).exp();
            assert!((psi - g).norm() < 1e-4, "x={x}");
        }
    }

    #[test]
    fn norm_is_conserved() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let w0 = rng.gen_range(5e-6..50e-6);
            let z0 = K0 * w0 * w0;
            let z = rng.gen_range(-5.0..5.0) * z0;
            let initial = w0 * (PI / 2.0).sqrt();
            let wide = 8.0 * w0 * (1.0 + (z / z0).abs());
            let (n, _) =
                norm_and_width(wide, 400, |x| propagate_1d(w0, z, K0, &spec(), x)).unwrap();
            assert_relative_eq!(n, initial, max_relative = 1e-6);
        }
    }

    #[test]
    fn biphoton_phase_is_sum_of_coordinates() {
        let s = ExperimentParams::reference(5.0).scales().unwrap();
        for z in [2e-4, 3e-3, 0.05] {
            let r = propagate_1d(s.omega, z, s.k0, &spec(), 0.0).unwrap();
            let q = propagate_1d(s.sigma, z, s.k0, &spec(), 0.0).unwrap();
            let total = on_axis_phase(r * q);
            let d = (total + gouy_free(z, &s)).rem_euclid(TAU);
            assert!(d < 1e-7 || TAU - d < 1e-7, "z={z} d={d}");
        }
    }

    #[test]
    fn lens_with_infinite_focus_is_free_propagation() {
        let w0 = 20e-6;
        let (z, zp) = (1e-3, 2e-3);
        let a = propagate_lens_1d(w0, z, 1e12, zp, K0, &spec(), 5e-6).unwrap();
        let b = propagate_1d(w0, z + zp, K0, &spec(), 5e-6).unwrap();
        assert!((a - b).norm() < 1e-6 * b.norm(), "{a} {b}");
    }

    #[test]
    fn lens_phase_matches_exact_form() {
        // z0 = 1.2 mm, f = 3 mm, z = 7 mm: per-coordinate phase is half the
        // biphoton value for equal Rayleigh lengths.
        let s = DerivedScales::from_rayleigh(K0, 1.2e-3, 1.2e-3).unwrap();
        for zp in [1e-3, 6e-3, 10e-3] {
            let psi = propagate_lens_1d(s.sigma, 7e-3, 3e-3, zp, K0, &spec(), 0.0).unwrap();
            let l = LensSetup::new(3e-3, 7e-3, zp).unwrap();
            let want = -0.5 * gouy_lens_exact(&l, &s);
            let d = (on_axis_phase(psi) - want).rem_euclid(TAU);
            assert!(d < 1e-5 || TAU - d < 1e-5, "z'={zp} d={d}");
            if zp == 6e-3 {
                // Printed form is 0 here; the ray-matrix phase is π/4 per coordinate.
                assert_eq!(gouy_lens(&l, &s), 0.0);
            }
        }
    }

    #[test]
    fn moments_match_entangle() {
        let s = ExperimentParams::reference(3.0).scales().unwrap();
        let a = gaussian_moments(&s, 2.0 * s.z0_minus);
        let b = moment_set(&s, 2.0 * s.z0_minus);
        for (x, y) in [
            (a.x1_sq, b.x1_sq),
            (a.x1x2, b.x1x2),
            (a.p1_sq, b.p1_sq),
            (a.p1p2, b.p1p2),
            (a.x1p2, b.x1p2),
            (a.sigma_xp, b.sigma_xp),
        ] {
            assert_relative_eq!(x, y, max_relative = 1e-10);
        }
    }

    #[test]
    fn moments_at_the_waist() {
        let s = ExperimentParams::reference(1.0).scales().unwrap();
        assert!(gaussian_moments(&s, 0.0).x1x2.abs() < 1e-30);
        let s = ExperimentParams::reference(4.0).scales().unwrap();
        let m = gaussian_moments(&s, 0.0);
        assert_relative_eq!(
            m.x1_sq,
            0.25 * (s.sigma.powi(2) + s.omega.powi(2)),
            max_relative = 1e-14
        );
        assert_eq!(m.sigma_xp, 0.0);
    }
}
