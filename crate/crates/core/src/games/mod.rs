//! Payoff matrices and the correspondence between symmetric games and
//! protocols: derivation of a protocol from a matrix, and recognition of the
//! protocols that some matrix induces.

mod matrix;
mod recognize;

pub use matrix::{two_state_matrix, Dressing, GameMatrix};
pub use recognize::{
    constraint_systems, recognize, successor_set, Certificate, CertificateStep, Constraint,
    ConstraintSystem, Inequality, RecognitionVerdict, TaggedConstraint, Var,
};
