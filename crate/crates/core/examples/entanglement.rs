//! Logarithmic negativity from the covariance matrix versus the closed
//! form, and the Schmidt number, across Ω/σ and propagation distance.

use biphoton::entangle::{
    log_negativity, log_negativity_from_spectrum, moments, pt_spectrum, schmidt_number,
};
use biphoton::{ExperimentParams, LogBase};

fn main() -> biphoton::Result<()> {
    println!(
        "{:>6} {:>10} {:>12} {:>12} {:>10}",
        "O/s", "z/z0-", "E_N matrix", "E_N closed", "K"
    );
    for ratio in [0.2, 1.0, 2.0, 5.0, 10.0] {
        let s = ExperimentParams::reference(ratio).scales()?;
        for k in [0.0, 10.0, 100.0] {
            let z = k * s.z0_minus;
            let spectrum = pt_spectrum(&moments(&s, z))?;
            println!(
                "{ratio:>6} {k:>10} {:>12.9} {:>12.9} {:>10.4}",
                log_negativity_from_spectrum(&spectrum, LogBase::Natural),
                log_negativity(&s, LogBase::Natural),
                schmidt_number(&s, z)?
            );
        }
    }
    Ok(())
}
