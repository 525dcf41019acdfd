//! Fit the two-dimensional Gouy model to seeded synthetic data.
//!
//! In the published arrangement (u ≈ 1.28 m) ζ barely depends on z_f, so
//! noisy data pin ζ₀ but leave z_f to wander; a short arrangement with
//! u ≈ 5 mm is shown for contrast.

use biphoton::fit::{fit, log_grid, default_synthetic_grid, synthesize, DEFAULT_TOL};
use biphoton::lens::FitModelParams;

fn run(label: &str, truth: &FitModelParams, grid: &[f64]) -> biphoton::Result<()> {
    println!("{label} (u = {:.2} mm)", truth.u() * 1e3);
    for (noise, seed) in [(0.0, 0), (0.05, 1), (0.05, 2)] {
        let data = synthesize(truth, grid, noise, seed)?;
        let r = fit(&data, truth, (2.0, 5e-3), DEFAULT_TOL)?;
        println!(
            "  noise {noise:4} seed {seed}: zeta0 = {:.6} rad  z_f = {:8.4} mm  rss = {:.3e}  converged = {} ({})",
            r.zeta0,
            r.z_f * 1e3,
            r.rss,
            r.converged,
            r.message
        );
    }
    Ok(())
}

fn main() -> biphoton::Result<()> {
    let published = FitModelParams::published();
    println!(
        "truth: zeta0 = {} rad  z_f = {} mm\n",
        published.zeta0,
        published.z_f * 1e3
    );
    run("published arrangement", &published, &default_synthetic_grid())?;
    let short = FitModelParams {
        z: 2.5e-3,
        z_prime: 2.5e-3,
        ..published
    };
    run("short arrangement", &short, &log_grid(9e-3, 0.2, 30))
}
