//! Dunkl operators, harmonic polynomials, pairings and matrix weights for dihedral groups
//! acting on two-dimensional vector polynomials.

pub mod cli;
pub mod dunkl;
pub mod error;
pub mod forms;
pub mod harmonic;
pub mod mat2;
pub mod polyalg;
pub mod quadrature;
pub mod scalars;
pub mod verify;
pub mod weight;

pub use error::{Error, Result};
