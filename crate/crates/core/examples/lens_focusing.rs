//! Thin-lens focusing with z0± = 1.2 mm, f = 3 mm, z = 7 mm: the printed
//! Gouy phase vanishes at z′ = 2f, next to the continuous and ray-matrix
//! phases, plus the post-lens waist.

use biphoton::lens::{focused_geometry, waist_position, LensSetup};
use biphoton::DerivedScales;

fn main() -> biphoton::Result<()> {
    let k0 = std::f64::consts::TAU / 702e-9;
    let s = DerivedScales::from_rayleigh(k0, 1.2e-3, 1.2e-3)?;
    let setup = LensSetup::new(3e-3, 7e-3, 1e-3)?;
    println!(
        "{:>8} {:>10} {:>11} {:>11} {:>10}",
        "z' [mm]", "zeta", "continuous", "ray-matrix", "B+ [um]"
    );
    for i in 1..=12 {
        let l = setup.with_z_prime(i as f64 * 1e-3)?;
        let g = focused_geometry(&l, &s)?;
        println!(
            "{i:>8} {:>10.6} {:>11.6} {:>11.6} {:>10.3}",
            g.zeta_printed,
            g.zeta,
            g.zeta_exact,
            g.b_plus * 1e6
        );
    }
    println!(
        "\nwaist of the plus mode: z' = {:.3} mm",
        waist_position(&setup, &s)? * 1e3
    );
    Ok(())
}
