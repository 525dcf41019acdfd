//! σ, k₀ and both Rayleigh lengths for the reference source, and for a
//! config file if one is given as the first argument.
//!
//!     cargo run --example derive_scales -- [path/to/params.conf]

use biphoton::params::Config;
use biphoton::ExperimentParams;

fn main() -> biphoton::Result<()> {
    let params = match std::env::args().nth(1) {
        Some(path) => Config::load(path.as_ref())?.params,
        None => ExperimentParams::reference(5.0),
    };
    let s = params.scales()?;
    println!("lambda   = {:.1} nm", params.lambda * 1e9);
    println!("lambda_p = {:.1} nm", params.lambda_p * 1e9);
    println!("L_p      = {:.2} mm", params.crystal_length * 1e3);
    println!("sigma    = {:.3} um", s.sigma * 1e6);
    println!(
        "Omega    = {:.3} um  ({:.2} sigma)",
        s.omega * 1e6,
        s.omega / s.sigma
    );
    println!("k0       = {:.4e} 1/m", s.k0);
    println!("z0_plus  = {:.4} mm", s.z0_plus * 1e3);
    println!("z0_minus = {:.4} mm", s.z0_minus * 1e3);
    println!("ratio    = {:.3}", s.z0_plus / s.z0_minus);
    Ok(())
}
