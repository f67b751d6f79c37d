//! Scattering matrices, effective Hamiltonians and quantum maps for
//! PT-symmetric coupled resonators.

pub mod cli;
pub mod error;
pub mod linalg;
pub mod qmap;
pub mod resonator;
pub mod scattering;
pub mod spectra;

pub use error::{Error, Result};
