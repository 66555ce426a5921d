//! The strata algebra: decorated boundary strata, their linear combinations,
//! products with ψ, κ and boundary divisors, gluing, and forgetful pullback
//! and pushforward.

mod class;
mod local;
mod stratum;

pub use class::{gluing_pushforward, BoundaryDivisor, DivisorAction, Locus, TautClass, TautClassJson, TermJson};
pub use stratum::{DecorationJson, Stratum};
