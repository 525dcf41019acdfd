//! Free-space evolution of the double-Gaussian biphoton.
//!
//! Relative coordinates are r = (x₁+x₂)/2 and q = (x₁−x₂)/2. The plus
//! coordinate has initial width Ω and Rayleigh length z0₊ = k₀Ω²; the minus
//! coordinate has σ and z0₋ = k₀σ². Both widths follow
//! w(z) = w₀√(1+(z/z₀)²) with their own w₀.
//!
//! Normalization: [`wavefunction`] carries the prefactor 1/√(4πw₊w₋), for
//! which ∫∫|Ψ|²·2 dr dq = 1/4 at every z (the factor 2 is the Jacobian of
//! (x₁,x₂) → (r,q)). [`normalized_wavefunction`] is twice that and has unit
//! norm in the same measure.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{positive, Result};
use crate::params::DerivedScales;

/// w₀√(1+(z/z₀)²).
pub fn beam_width(z: f64, z0: f64, w0: f64) -> Result<f64> {
    let z0 = positive("z0", z0)?;
    let w0 = positive("w0", w0)?;
    let t = z / z0;
    Ok(w0 * (1.0 + t * t).sqrt())
}

/// z(1+(z₀/z)²); infinite (flat front) at the waist.
pub fn curvature_radius(z: f64, z0: f64) -> Result<f64> {
    let z0 = positive("z0", z0)?;
    if z == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(z * (1.0 + (z0 / z).powi(2)))
}

/// 1/r(z) = z/(z²+z₀²), finite everywhere including the waist.
pub fn inverse_radius(z: f64, z0: f64) -> f64 {
    z / (z * z + z0 * z0)
}

/// ½[arctan(z/z0₊) + arctan(z/z0₋)].
pub fn gouy_free(z: f64, scales: &DerivedScales) -> f64 {
    0.5 * ((z / scales.z0_plus).atan() + (z / scales.z0_minus).atan())
}

/// The single-arctan rewriting ½·arctan[z(z0₊+z0₋)/(z0₊z0₋−z²)]. It equals
/// [`gouy_free`] only while z² < z0₊z0₋ and drops by π/2 beyond.
pub fn gouy_free_single_arctan(z: f64, scales: &DerivedScales) -> f64 {
    let (a, b) = (scales.z0_plus, scales.z0_minus);
    0.5 * (z * (a + b) / (a * b - z * z)).atan()
}

/// Widths, radii and phases of the propagated state at one longitudinal position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamGeometry {
    pub z: f64,
    pub w_plus: f64,
    pub w_minus: f64,
    /// Signed; `±inf` at z = 0.
    pub r_plus: f64,
    pub r_minus: f64,
    pub zeta: f64,
    pub zeta_plus: f64,
    pub zeta_minus: f64,
}

impl BeamGeometry {
    pub fn at(z: f64, scales: &DerivedScales) -> BeamGeometry {
        let zeta_plus = (z / scales.z0_plus).atan();
        let zeta_minus = (z / scales.z0_minus).atan();
        // Scales are validated on construction, so these cannot fail.
        let w = |z0, w0| beam_width(z, z0, w0).expect("validated scales");
        let r = |z0| curvature_radius(z, z0).expect("validated scales");
        BeamGeometry {
            z,
            w_plus: w(scales.z0_plus, scales.omega),
            w_minus: w(scales.z0_minus, scales.sigma),
            r_plus: r(scales.z0_plus),
            r_minus: r(scales.z0_minus),
            zeta: 0.5 * (zeta_plus + zeta_minus),
            zeta_plus,
            zeta_minus,
        }
    }

    pub fn inv_r_plus(&self) -> f64 {
        if self.r_plus.is_infinite() {
            0.0
        } else {
            1.0 / self.r_plus
        }
    }

    pub fn inv_r_minus(&self) -> f64 {
        if self.r_minus.is_infinite() {
            0.0
        } else {
            1.0 / self.r_minus
        }
    }
}

/// Complex value of Ψ(r, q, z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiphotonAmplitude {
    pub r: f64,
    pub q: f64,
    pub value: Complex64,
}

impl BiphotonAmplitude {
    pub fn re(&self) -> f64 {
        self.value.re
    }

    pub fn im(&self) -> f64 {
        self.value.im
    }

    pub fn phase(&self) -> f64 {
        self.value.arg()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.value.norm_sqr()
    }
}

/// Ψ(r,q,z) = (4πw₊w₋)^{-1/2}·exp(−r²/w₊² − q²/w₋²)·exp(−i[−k₀r²/r₊ − k₀q²/r₋ + ζ]).
pub fn wavefunction(
    r: f64,
    q: f64,
    geom: &BeamGeometry,
    scales: &DerivedScales,
) -> BiphotonAmplitude {
    let amplitude = (4.0 * PI * geom.w_plus * geom.w_minus).sqrt().recip()
        * (-(r * r) / geom.w_plus.powi(2) - q * q / geom.w_minus.powi(2)).exp();
    let phase =
        scales.k0 * r * r * geom.inv_r_plus() + scales.k0 * q * q * geom.inv_r_minus() - geom.zeta;
    BiphotonAmplitude {
        r,
        q,
        value: Complex64::from_polar(amplitude, phase),
    }
}

/// [`wavefunction`] rescaled so that ∫∫|Ψ|²·2 dr dq = 1.
pub fn normalized_wavefunction(
    r: f64,
    q: f64,
    geom: &BeamGeometry,
    scales: &DerivedScales,
) -> BiphotonAmplitude {
    let mut a = wavefunction(r, q, geom, scales);
    a.value *= 2.0;
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ExperimentParams;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    fn fig1(k: f64) -> DerivedScales {
        ExperimentParams::reference(k).scales().unwrap()
    }

    #[test]
    fn width_limits() {
        assert_eq!(beam_width(0.0, 2.0, 3.0).unwrap(), 3.0);
        assert_relative_eq!(beam_width(2.0, 2.0, 3.0).unwrap(), 3.0 * 2f64.sqrt());
        // k0 = 1, w0 = 2, z0 = 4, z = 2
        assert_relative_eq!(
            beam_width(2.0, 4.0, 2.0).unwrap().powi(2),
            5.0,
            max_relative = 1e-15
        );
        assert!(beam_width(1.0, 0.0, 1.0).is_err());
        assert!(beam_width(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn radius_values() {
        assert_relative_eq!(curvature_radius(1.5, 1.5).unwrap(), 3.0);
        assert!(curvature_radius(0.0, 1.5).unwrap().is_infinite());
        assert_relative_eq!(
            curvature_radius(2e-3, 1.2e-3).unwrap(),
            2.72e-3,
            max_relative = 1e-14
        );
        assert!(curvature_radius(-2e-3, 1.2e-3).unwrap() < 0.0);
    }

    #[test]
    fn gouy_limits() {
        let s = fig1(5.0);
        assert_eq!(gouy_free(0.0, &s), 0.0);
        let big = 1e3 * s.z0_plus.max(s.z0_minus);
        assert!((FRAC_PI_2 - gouy_free(big, &s)).abs() < 1e-3);
        assert!((FRAC_PI_2 + gouy_free(-big, &s)).abs() < 1e-3);
    }

    #[test]
    fn waist_wavefunction_is_real_positive() {
        let s = fig1(5.0);
        let g = BeamGeometry::at(0.0, &s);
        let psi = wavefunction(0.0, 0.0, &g, &s);
        assert_relative_eq!(
            psi.re(),
            (4.0 * PI * s.omega * s.sigma).sqrt().recip(),
            max_relative = 1e-15
        );
        assert_eq!(psi.im(), 0.0);
        assert_eq!(g.w_plus, s.omega);
        assert_eq!(g.w_minus, s.sigma);
    }

    #[test]
    fn on_axis_phase_is_minus_gouy() {
        let s = fig1(5.0);
        for i in 0..60 {
            let z = -0.3 + 0.6 * i as f64 / 59.0;
            let g = BeamGeometry::at(z, &s);
            let psi = wavefunction(0.0, 0.0, &g, &s);
            let d = (psi.phase() + gouy_free(z, &s)).rem_euclid(2.0 * PI);
            assert!(d < 1e-12 || 2.0 * PI - d < 1e-12, "z={z} d={d}");
        }
    }

    #[test]
    fn norm_is_z_independent() {
        // ∫∫|Ψ|² 2 dr dq by tensor Simpson on ±8 widths.
        let s = fig1(3.0);
        let simpson_norm = |z: f64| {
            let g = BeamGeometry::at(z, &s);
            let n = 400;
            let (hr, hq) = (16.0 * g.w_plus / n as f64, 16.0 * g.w_minus / n as f64);
            let wgt = |i: usize| {
                if i == 0 || i == n {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                }
            };
            let mut acc = 0.0;
            for i in 0..=n {
                for j in 0..=n {
                    let r = -8.0 * g.w_plus + hr * i as f64;
                    let q = -8.0 * g.w_minus + hq * j as f64;
                    acc += wgt(i) * wgt(j) * normalized_wavefunction(r, q, &g, &s).norm_sqr();
                }
            }
            2.0 * acc * hr * hq / 9.0
        };
        for z in [0.0, 1e-3, 0.05, -0.2] {
            assert_relative_eq!(simpson_norm(z), 1.0, max_relative = 1e-10);
        }
    }

    #[test]
    fn single_arctan_branch() {
        let s = fig1(5.0);
        let zc = (s.z0_plus * s.z0_minus).sqrt();
        for k in 1..50 {
            let z = zc * k as f64 / 50.0;
            assert!((gouy_free_single_arctan(z, &s) - gouy_free(z, &s)).abs() < 1e-12);
            let z = zc * (1.0 + k as f64);
            let jump = gouy_free(z, &s) - gouy_free_single_arctan(z, &s);
            assert!((jump - FRAC_PI_2).abs() < 1e-12, "jump {jump}");
        }
    }

    #[test]
    fn smaller_omega_gives_larger_phase() {
        let (a, b) = (fig1(5.0), fig1(10.0));
        for i in 1..=500 {
            let z = 1e-4 * 1.03f64.powi(i);
            assert!(gouy_free(z, &a) > gouy_free(z, &b), "z={z}");
        }
    }

    proptest::proptest! {
        #[test]
        fn gouy_strictly_increasing(z in -1.0f64..1.0, dz in 1e-6f64..1e-2, k in 0.2f64..10.0) {
            let s = fig1(k);
            proptest::prop_assert!(gouy_free(z + dz, &s) > gouy_free(z, &s));
        }

        #[test]
        fn geometry_invariants(z in -1.0f64..1.0, k in 0.2f64..10.0) {
            let s = fig1(k);
            let g = BeamGeometry::at(z, &s);
            proptest::prop_assert!(g.w_plus >= s.omega && g.w_minus >= s.sigma);
            proptest::prop_assert_eq!(g.zeta, (g.zeta_plus + g.zeta_minus) / 2.0);
            if z.abs() > 1e-6 {
                proptest::prop_assert!(g.w_plus > s.omega);
                proptest::prop_assert_eq!(g.r_plus.signum(), z.signum());
            }
        }
    }
}
