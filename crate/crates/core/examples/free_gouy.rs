//! Free-space biphoton Gouy phase for Ω = 5σ and Ω = 10σ, and the point
//! where the single-arctan rewriting leaves the principal branch.

use biphoton::freeprop::{gouy_free, gouy_free_single_arctan, BeamGeometry};
use biphoton::ExperimentParams;

fn main() -> biphoton::Result<()> {
    let s5 = ExperimentParams::reference(5.0).scales()?;
    let s10 = ExperimentParams::reference(10.0).scales()?;
    println!(
        "{:>10} {:>12} {:>12} {:>12}",
        "z [mm]", "zeta(5s)", "zeta(10s)", "w+ [um]"
    );
    for z_mm in [0.1, 1.0, 3.0, 10.0, 30.0, 100.0, 300.0, 1000.0] {
        let z = z_mm * 1e-3;
        let g = BeamGeometry::at(z, &s5);
        println!(
            "{z_mm:>10} {:>12.6} {:>12.6} {:>12.3}",
            gouy_free(z, &s5),
            gouy_free(z, &s10),
            g.w_plus * 1e6
        );
    }
    let cross = (s5.z0_plus * s5.z0_minus).sqrt();
    println!(
        "\nsingle-arctan form agrees below z = {:.3} mm:",
        cross * 1e3
    );
    for f in [0.5, 2.0] {
        let z = f * cross;
        println!(
            "  z = {:.3} mm  half-sum {:.6}  single arctan {:.6}",
            z * 1e3,
            gouy_free(z, &s5),
            gouy_free_single_arctan(z, &s5)
        );
    }
    Ok(())
}
