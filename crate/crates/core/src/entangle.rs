//! Covariance matrix, partial-transpose symplectic spectrum, logarithmic
//! negativity and the double-Gaussian Schmidt number.
//!
//! Units: ħ = 1 and the length scale L = 1. Position moments carry length²,
//! momentum moments 1/length², and every symplectic invariant is
//! dimensionless. With this normalization a product state (Ω = σ) has
//! ν = 1/2.

use crate::dd::Dd;
use nalgebra::Matrix4;

use crate::error::{Error, Result};
use crate::freeprop::{inverse_radius, BeamGeometry};
use crate::params::{DerivedScales, LogBase};

/// Second moments of the two-photon state at one z.
///
/// `sigma_xp` is the symmetrized ⟨x₁p₁+p₁x₁⟩/2 (equal for both photons).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    pub x1_sq: f64,
    pub x1x2: f64,
    pub p1_sq: f64,
    pub p1p2: f64,
    pub x1p2: f64,
    pub sigma_xp: f64,
}

/// Closed-form moments at z, in terms of t± = z/z0± = tan ζ±.
pub fn moment_set(scales: &DerivedScales, z: f64) -> MomentSet {
    let [x1_sq, x1x2, p1_sq, p1p2, x1p2, sigma_xp] = moment_set_dd(scales, z).map(Dd::to_f64);
    MomentSet {
        x1_sq,
        x1x2,
        p1_sq,
        p1p2,
        x1p2,
        sigma_xp,
    }
}

// Far from the waist det G = ⟨x²⟩⟨p²⟩ − σ_xp² cancels ~2·log10(z/z0) digits,
// which f64 entries cannot survive at z = 100·z0₋ with Ω = σ/10. The
// entries are therefore formed in double-double from one consistent ratio
// ρ = z0₊/z0₋ (= Ω²/σ²).
fn moment_set_dd(scales: &DerivedScales, z: f64) -> [Dd; 6] {
    let one = Dd::from(1.0);
    let quarter = Dd::from(0.25);
    let s2 = Dd::from(scales.sigma) * scales.sigma;
    let rho = Dd::from(scales.z0_plus) / scales.z0_minus;
    let tm = Dd::from(z) / scales.z0_minus;
    let tp = tm / rho;
    let t2 = tp * tm;
    [
        quarter * s2 * (one + rho) * (one + t2),
        quarter * s2 * (rho - one) * (one - t2),
        quarter / s2 * (one / rho + one),
        quarter / s2 * (one / rho - one),
        quarter * (tp - tm),
        quarter * (tp + tm),
    ]
}

fn entries_of(v: &[Dd; 6]) -> [[Dd; 4]; 4] {
    let [x, xx, p, pp, xp, sxp] = *v;
    [
        [x, sxp, xx, xp],
        [sxp, p, xp, pp],
        [xx, xp, x, sxp],
        [xp, pp, sxp, p],
    ]
}

/// 4×4 covariance matrix in the basis (X₁, P₁, X₂, P₂).
///
/// `entries` holds the f64 values; determinants are taken in double-double
/// from `entries + lo`, where `lo` is the low-order residual kept by
/// [`moments`] (zero for matrices built from a plain [`MomentSet`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix {
    pub entries: Matrix4<f64>,
    lo: Matrix4<f64>,
    pub z: f64,
    /// √det G.
    pub g: f64,
    /// √det H.
    pub h: f64,
    /// Standard-form correlations with c·c′ = det C.
    pub c: f64,
    pub cp: f64,
}

impl CovarianceMatrix {
    pub fn from_moments(m: &MomentSet, z: f64) -> CovarianceMatrix {
        let v = [m.x1_sq, m.x1x2, m.p1_sq, m.p1p2, m.x1p2, m.sigma_xp].map(Dd::from);
        Self::from_dd(&entries_of(&v), z)
    }

    /// Any 4×4 matrix, e.g. one assembled by hand or from quadrature.
    pub fn from_matrix(entries: Matrix4<f64>, z: f64) -> CovarianceMatrix {
        let mut e = [[Dd::from(0.0); 4]; 4];
        for (i, row) in e.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = Dd::from(entries[(i, j)]);
            }
        }
        Self::from_dd(&e, z)
    }

    fn from_dd(e: &[[Dd; 4]; 4], z: f64) -> CovarianceMatrix {
        let entries = Matrix4::from_fn(|i, j| e[i][j].hi);
        let lo = Matrix4::from_fn(|i, j| e[i][j].lo);
        let mut cm = CovarianceMatrix {
            entries,
            lo,
            z,
            g: 0.0,
            h: 0.0,
            c: 0.0,
            cp: 0.0,
        };
        cm.g = cm.det_g().max(0.0).sqrt();
        cm.h = cm.det_h().max(0.0).sqrt();
        let (c, cp) = standard_form_correlations(cm.g * cm.h, cm.det_c(), cm.det());
        cm.c = c;
        cm.cp = cp;
        cm
    }

    fn at(&self, i: usize, j: usize) -> Dd {
        Dd::new(self.entries[(i, j)], self.lo[(i, j)])
    }

    fn minor(&self, r: (usize, usize), c: (usize, usize)) -> Dd {
        self.at(r.0, c.0) * self.at(r.1, c.1) - self.at(r.0, c.1) * self.at(r.1, c.0)
    }

    fn det_g_dd(&self) -> Dd {
        self.minor((0, 1), (0, 1))
    }

    fn det_h_dd(&self) -> Dd {
        self.minor((2, 3), (2, 3))
    }

    fn det_c_dd(&self) -> Dd {
        self.minor((0, 1), (2, 3))
    }

    /// Laplace expansion along the first two rows.
    fn det_dd(&self) -> Dd {
        const PAIRS: [((usize, usize), (usize, usize), f64); 6] = [
            ((0, 1), (2, 3), 1.0),
            ((0, 2), (1, 3), -1.0),
            ((0, 3), (1, 2), 1.0),
            ((1, 2), (0, 3), 1.0),
            ((1, 3), (0, 2), -1.0),
            ((2, 3), (0, 1), 1.0),
        ];
        PAIRS.iter().fold(Dd::from(0.0), |acc, &(c, rest, sign)| {
            acc + self.minor((0, 1), c) * self.minor((2, 3), rest) * sign
        })
    }

    pub fn det_g(&self) -> f64 {
        self.det_g_dd().to_f64()
    }

    pub fn det_h(&self) -> f64 {
        self.det_h_dd().to_f64()
    }

    pub fn det_c(&self) -> f64 {
        self.det_c_dd().to_f64()
    }

    pub fn det(&self) -> f64 {
        self.det_dd().to_f64()
    }

    /// Max |M − Mᵀ| relative to the largest entry.
    pub fn asymmetry(&self) -> f64 {
        let scale = self.entries.amax();
        (self.entries - self.entries.transpose()).amax() / scale
    }
}

/// With g·h, det C and det M known, the standard form satisfies
/// det M = (gh − c²)(gh − c′²) and det C = c·c′.
fn standard_form_correlations(gh: f64, det_c: f64, det_m: f64) -> (f64, f64) {
    if gh <= 0.0 {
        return (0.0, 0.0);
    }
    let sum = (gh * gh + det_c * det_c - det_m) / gh;
    let disc = (sum * sum - 4.0 * det_c * det_c).max(0.0);
    let c = (0.5 * (sum + disc.sqrt())).max(0.0).sqrt();
    let cp = if c > 0.0 { det_c / c } else { 0.0 };
    (c, cp)
}

/// Covariance matrix of the propagated state at z.
pub fn moments(scales: &DerivedScales, z: f64) -> CovarianceMatrix {
    CovarianceMatrix::from_dd(&entries_of(&moment_set_dd(scales, z)), z)
}

/// Symplectic eigenvalues of the partially transposed matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticSpectrum {
    pub nu_1: f64,
    pub nu_2: f64,
    pub nu_min: f64,
}

pub fn pt_spectrum(m: &CovarianceMatrix) -> Result<SymplecticSpectrum> {
    let delta_dd = m.det_g_dd() + m.det_h_dd() - m.det_c_dd() * 2.0;
    let det_dd = m.det_dd();
    let (delta, det) = (delta_dd.to_f64(), det_dd.to_f64());
    let disc = (delta_dd * delta_dd - det_dd * 4.0).to_f64();
    if disc < -1e-10 * delta * delta {
        return Err(Error::Numerical(format!(
            "partial-transpose discriminant {disc:e} is negative (Δ̃ = {delta:e}, det M = {det:e})"
        )));
    }
    let root = disc.max(0.0).sqrt();
    let nu_1 = (0.5 * (delta + root)).sqrt();
    // ν₂² = det M / ν₁² avoids the cancellation in Δ̃ − root.
    let nu_2 = if nu_1 > 0.0 {
        det.max(0.0).sqrt() / nu_1
    } else {
        0.0
    };
    Ok(SymplecticSpectrum {
        nu_1,
        nu_2,
        nu_min: nu_1.min(nu_2),
    })
}

/// max{0, −log(2ν_min)}.
pub fn log_negativity_from_spectrum(spectrum: &SymplecticSpectrum, base: LogBase) -> f64 {
    (-base.log(2.0 * spectrum.nu_min)).max(0.0)
}

/// Closed form: log √(z0_max/z0_min). Independent of z.
pub fn log_negativity(scales: &DerivedScales, base: LogBase) -> f64 {
    let (a, b) = (scales.z0_plus, scales.z0_minus);
    if a <= b {
        base.log((b / a).sqrt())
    } else {
        base.log((a / b).sqrt())
    }
}

/// (√(z0₋/z0₊) + √(z0₊/z0₋))².
pub fn schmidt_number_closed(scales: &DerivedScales) -> f64 {
    let ratio = (scales.z0_plus / scales.z0_minus).sqrt();
    (ratio + 1.0 / ratio).powi(2)
}

/// (w₊/w₋ + w₋/w₊)² + k₀²w₊²w₋²(1/r₋ − 1/r₊)², evaluated at z.
pub fn schmidt_number_propagated(scales: &DerivedScales, z: f64) -> f64 {
    let g = BeamGeometry::at(z, scales);
    let inv_r = inverse_radius(z, scales.z0_minus) - inverse_radius(z, scales.z0_plus);
    (g.w_plus / g.w_minus + g.w_minus / g.w_plus).powi(2)
        + (scales.k0 * g.w_plus * g.w_minus * inv_r).powi(2)
}

/// Double-Gaussian Schmidt number. Evaluates the propagated expression and
/// the closed form, returns the closed form, and fails if they disagree.
pub fn schmidt_number(scales: &DerivedScales, z: f64) -> Result<f64> {
    let closed = schmidt_number_closed(scales);
    let propagated = schmidt_number_propagated(scales, z);
    let rel = ((propagated - closed) / closed).abs();
    if rel > 1e-9 {
        return Err(Error::Numerical(format!(
            "Schmidt number mismatch at z = {z:e}: propagated {propagated}, closed {closed}"
        )));
    }
    Ok(closed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ExperimentParams;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn scales(k: f64) -> DerivedScales {
        ExperimentParams::reference(k).scales().unwrap()
    }

    #[test]
    fn separable_case_is_vacuum() {
        let s = scales(1.0);
        for z in [0.0, 1e-3, -0.05] {
            let sp = pt_spectrum(&moments(&s, z)).unwrap();
            assert_relative_eq!(sp.nu_1, 0.5, max_relative = 1e-10);
            assert_relative_eq!(sp.nu_2, 0.5, max_relative = 1e-10);
            let en = log_negativity_from_spectrum(&sp, LogBase::Natural);
            assert!(en < 1e-14, "{en:e} {sp:?}");
        }
    }

    #[test]
    fn waist_position_variance() {
        let s = scales(5.0);
        let m = moments(&s, 0.0);
        assert_relative_eq!(
            m.entries[(0, 0)],
            0.25 * 26.0 * s.sigma.powi(2),
            max_relative = 1e-14
        );
        assert_eq!(m.entries[(0, 1)], 0.0);
    }

    #[test]
    fn spectrum_matches_omega_over_two_sigma() {
        let s = scales(5.0);
        let sp = pt_spectrum(&moments(&s, 3e-3)).unwrap();
        assert_relative_eq!(sp.nu_1, 2.5, max_relative = 1e-10);
        assert_relative_eq!(sp.nu_2, 0.1, max_relative = 1e-10);
        assert_relative_eq!(
            sp.nu_1 * sp.nu_2,
            moments(&s, 3e-3).det().sqrt(),
            max_relative = 1e-10
        );
    }

    #[test]
    fn negativity_values() {
        assert_eq!(log_negativity(&scales(1.0), LogBase::Natural), 0.0);
        assert_relative_eq!(
            log_negativity(&scales(5.0), LogBase::Natural),
            5f64.ln(),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            log_negativity(&scales(10.0), LogBase::Natural),
            10f64.ln(),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            log_negativity(&scales(0.2), LogBase::Natural),
            5f64.ln(),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            log_negativity(&scales(4.0), LogBase::Two),
            2.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn matrix_structure() {
        let s = scales(3.0);
        for z in [0.0, 2.0 * s.z0_minus, -40.0 * s.z0_minus] {
            let m = moments(&s, z);
            assert!(m.asymmetry() <= 1e-14);
            assert_eq!(m.g, m.h);
            assert_relative_eq!(m.c * m.cp, m.det_c(), max_relative = 1e-10);
            // c, c' reconstruct det M
            let gh = m.g * m.h;
            assert_relative_eq!(
                (gh - m.c * m.c) * (gh - m.cp * m.cp),
                m.det(),
                max_relative = 1e-8
            );
        }
    }

    #[test]
    fn block_determinants_z_independent() {
        let s = scales(3.0);
        let base = moments(&s, 0.0);
        for k in [-100.0, -10.0, -1.0, 1.0, 10.0, 100.0] {
            let m = moments(&s, k * s.z0_minus);
            assert_relative_eq!(m.det_g(), base.det_g(), max_relative = 1e-10);
            assert_relative_eq!(m.det_h(), base.det_h(), max_relative = 1e-10);
            assert_relative_eq!(m.det_c(), base.det_c(), max_relative = 1e-10);
        }
    }

    #[test]
    fn schmidt_hand_value() {
        // k0 = 1, Ω = 2, σ = 1: z0₊ = 4, z0₋ = 1
        let s = DerivedScales::from_rayleigh(1.0, 4.0, 1.0).unwrap();
        assert!((schmidt_number_propagated(&s, 2.0) - 6.25).abs() < 1e-12);
        assert!((schmidt_number(&s, 2.0).unwrap() - 6.25).abs() < 1e-12);
        assert_eq!(schmidt_number_closed(&scales(1.0)), 4.0);
        assert_relative_eq!(
            schmidt_number_closed(&scales(5.0)),
            27.04,
            max_relative = 1e-12
        );
    }

    #[test]
    fn schmidt_identity_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let s = scales(rng.gen_range(0.1..10.0));
            let z = rng.gen_range(-50.0..50.0) * s.z0_minus;
            let (a, b) = (schmidt_number_propagated(&s, z), schmidt_number_closed(&s));
            assert_relative_eq!(a, b, max_relative = 1e-9);
        }
    }

    #[test]
    fn gap_is_log_one_plus_inverse_ratio() {
        for k in [1.0, 2.0, 1.0 / 3.0, 3.2, 10.0, 0.05] {
            let s = scales(k);
            let r = s.rayleigh_ratio();
            let gap = schmidt_number_closed(&s).sqrt().ln() - log_negativity(&s, LogBase::Natural);
            assert!((gap - (1.0 + 1.0 / r).ln()).abs() < 1e-10);
            if r >= 10.0 {
                assert!(gap >= 0.0 && gap <= 1.0 / r);
            }
        }
    }

    #[test]
    fn position_momentum_covariance_tracks_gouy() {
        let s = scales(4.0);
        let mut constant = None;
        for i in 1..40 {
            let z = i as f64 * 7e-4;
            let g = BeamGeometry::at(z, &s);
            let ratio = moments(&s, z).entries[(0, 1)] / (g.zeta_plus.tan() + g.zeta_minus.tan());
            let c0 = *constant.get_or_insert(ratio);
            assert_relative_eq!(ratio, c0, max_relative = 1e-12);
        }
        assert_relative_eq!(constant.unwrap(), 0.25, max_relative = 1e-12);
    }

    #[test]
    fn negativity_varies_more_than_gouy_below_unit_ratio() {
        let (k0, z0m, z) = (2.0 * std::f64::consts::PI / 702e-9, 1.2e-3, 20e-3);
        let sweep = |lo: f64, hi: f64| {
            let n = 200;
            let vals: Vec<(f64, f64)> = (0..n)
                .map(|i| {
                    let ratio = lo * (hi / lo).powf(i as f64 / (n - 1) as f64);
                    let s = DerivedScales::from_rayleigh(k0, ratio * z0m, z0m).unwrap();
                    (
                        log_negativity(&s, LogBase::Natural),
                        crate::freeprop::gouy_free(z, &s),
                    )
                })
                .collect();
            let tv = |f: &dyn Fn(&(f64, f64)) -> f64| {
                vals.windows(2)
                    .map(|w| (f(&w[1]) - f(&w[0])).abs())
                    .sum::<f64>()
            };
            (tv(&|v| v.0), tv(&|v| v.1))
        };
        let (en_low, zeta_low) = sweep(0.01, 1.0);
        assert!(en_low > zeta_low, "{en_low} vs {zeta_low}");
        let (_, zeta_high) = sweep(1.0, 20.0);
        assert!(zeta_high > 0.1, "{zeta_high}");
    }

    #[test]
    fn broken_matrix_is_reported() {
        #[rustfmt::skip]
        let bad = Matrix4::new(
            -0.1, -0.3, -0.1,  1.0,
            -0.3,  0.9,  0.1,  0.3,
            -0.1,  0.1, -0.9, -1.1,
             1.0,  0.3, -1.1,  0.1,
        );
        let m = CovarianceMatrix::from_matrix(bad, 0.0);
        assert!(matches!(pt_spectrum(&m), Err(Error::Numerical(_))));
    }

    #[test]
    fn negativity_far_from_waist_small_ratio() {
        // Ω = σ/10 at z = ±100·z0₋: t₊ = 10⁴ and det G cancels 12 digits.
        for k in [0.1, 0.15, 10.0] {
            let s = scales(k);
            let en = log_negativity(&s, LogBase::Natural);
            for m in [0.0, 1.0, -10.0, 100.0, -100.0] {
                let sp = pt_spectrum(&moments(&s, m * s.z0_minus)).unwrap();
                let e = log_negativity_from_spectrum(&sp, LogBase::Natural);
                assert!((e - en).abs() < 1e-12, "k={k} m={m} {e} {en}");
            }
        }
    }
}
