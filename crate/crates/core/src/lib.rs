//! Double-Gaussian model of type-I SPDC biphotons.
//!
//! The crate covers free propagation of the two-photon wavefunction and its
//! Gouy phase ([`freeprop`]), covariance-matrix entanglement measures
//! ([`entangle`]), thin-lens focusing and the Gouy-phase fit model ([`lens`]),
//! least-squares fitting of that model to measured phases ([`fit`]), and an
//! independent Fresnel-quadrature oracle that checks the closed forms
//! ([`oracle`]). [`cli`] drives everything from the command line and writes
//! figure data as CSV.
//!
//! Lengths are in meters throughout.

pub mod cli;
mod dd;
pub mod entangle;
pub mod error;
pub mod fit;
pub mod freeprop;
pub mod lens;
pub mod oracle;
pub mod params;

pub use error::{Error, Result};
pub use params::{DerivedScales, ExperimentParams, LogBase};
