//! Direct Fresnel quadrature against the closed forms: on-axis phase after
//! free propagation and after a lens, and the propagated width.

use biphoton::freeprop::{beam_width, gouy_free};
use biphoton::lens::{gouy_lens_exact, LensSetup};
use biphoton::oracle::{
    norm_and_width, on_axis_phase, propagate_1d, propagate_lens_1d, QuadratureSpec,
};
use biphoton::ExperimentParams;

fn main() -> biphoton::Result<()> {
    let s = ExperimentParams::reference(5.0).scales()?;
    let spec = QuadratureSpec::default();
    for z in [s.z0_minus, 10.0 * s.z0_minus, s.z0_plus] {
        let r = propagate_1d(s.omega, z, s.k0, &spec, 0.0)?;
        let q = propagate_1d(s.sigma, z, s.k0, &spec, 0.0)?;
        println!(
            "free z = {:8.3} mm  quadrature {:.10}  closed {:.10}",
            z * 1e3,
            -on_axis_phase(r * q),
            gouy_free(z, &s)
        );
    }

    let z = 4e-3;
    let (half, n) = (8.0 * beam_width(z, s.z0_minus, s.sigma)?, 400);
    let (_, width) = norm_and_width(half, n, |x| propagate_1d(s.sigma, z, s.k0, &spec, x))?;
    println!(
        "\nwidth at z = 4 mm: quadrature {:.6e}  closed {:.6e}",
        width,
        beam_width(z, s.z0_minus, s.sigma)?
    );

    // Nested quadrature: fewer nodes keep this to a fraction of a second.
    let spec = QuadratureSpec {
        n_points: 1024,
        ..spec
    };
    let (f, z, zp) = (3e-3, 7e-3, 5e-3);
    let r = propagate_lens_1d(s.omega, z, f, zp, s.k0, &spec, 0.0)?;
    let q = propagate_lens_1d(s.sigma, z, f, zp, s.k0, &spec, 0.0)?;
    let want = gouy_lens_exact(&LensSetup::new(f, z, zp)?, &s);
    println!(
        "lens: quadrature {:.10}  ray matrix {:.10}",
        -on_axis_phase(r * q),
        want
    );
    Ok(())
}
