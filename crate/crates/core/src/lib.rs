//! Exact semipositivity analysis of real matrices over polyhedral cones.
//!
//! All arithmetic is over the rationals. Every verdict carries a witness or
//! certificate that is re-checked exactly before it is returned.

pub mod cli;
pub mod cone;
pub mod error;
pub mod lp;
pub mod matrix;
pub mod patterns;
pub mod preservers;
pub mod random;
pub mod semipos;

pub use cone::PolyCone;
pub use error::{Error, Result};
pub use matrix::{RMatrix, Rational};
pub use preservers::LinearMap;
pub use semipos::{classify_msp, classify_sp, MspVerdict, SpVerdict};
