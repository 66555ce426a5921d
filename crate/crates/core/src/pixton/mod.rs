//! Pixton's formula for the double ramification cycle, via weightings
//! modulo r and exact interpolation in r.

mod omega;
mod weighting;

pub use omega::{omega_constant_term, omega_r, OmegaEngine, RPolynomial};
pub use weighting::{enumerate_weightings, Weighting};
