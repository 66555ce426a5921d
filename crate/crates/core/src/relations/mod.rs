//! Θ-relations, DR relations, and the eliminations producing boundary
//! expressions for tautological classes.

mod db;
mod dr;
mod eliminate;
mod monomial;
mod theta;
mod trr;

pub use db::{DbKey, DbRecord, RelationDb};
pub use dr::{dr_relation_coefficient, DrEngine};
pub use eliminate::{star_census, BoundaryExpression, Eliminator, ProvenanceStep, RelationRecord};
pub use monomial::Monomial;
pub use theta::{
    a_coefficient, eliminate_last, half_sum_psi, theta_divisor, theta_divisor_at, theta_exp, theta_power_relation,
    theta_power_symbolic,
};
pub use trr::{printed_trr, trr_report, TrrReport};
