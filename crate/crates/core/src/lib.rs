//! Quantized spectra, box eigenstates and charge densities of relativistic
//! spin-0 (Feshbach-Villars) and spin-1/2 (Dirac) particles in 1D and 3D
//! infinite wells.
//!
//! All quantities are dimensionless: lengths in Compton wavelengths,
//! energies in units of the rest energy.

pub mod cli;
pub mod error;
pub mod fields;
pub mod model;
pub mod rootfind;
pub mod spectra;

pub use error::{Error, Result};
