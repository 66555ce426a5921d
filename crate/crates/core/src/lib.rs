pub mod algebra;
pub mod graphs;
pub mod pixton;
pub mod relations;
pub mod cli;
pub mod strata;
pub mod error;

pub use error::{Error, Result};
