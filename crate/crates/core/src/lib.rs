//! Jost functions, spectral singularities and Darboux transformations for
//! complex potentials on the half-line.

pub mod darboux;
pub mod error;
pub mod ode;
pub mod parse;
pub mod potentials;
mod quad;
pub mod schrodinger;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
