//! Population protocols and the symmetric games that induce them.
//!
//! * [`protocol`]: protocols, configurations and one-step semantics.
//! * [`predicate`]: predicates over input counts.
//! * [`games`]: payoff matrices, derivation of a protocol from a matrix
//!   under win-stay/lose-shift play, and recognition of derivable protocols.
//! * [`checker`]: exhaustive stable-computation checks and simulation.
//! * [`transform`]: compiling any protocol into a symmetric one.
//! * [`search`]: exhaustive enumeration of small derivable protocols.
//! * [`library`]: named protocols and matrices.
//! * [`text`]: the protocol and matrix file formats.

pub mod checker;
pub mod cli;
pub mod error;
pub mod games;
pub mod library;
pub mod predicate;
pub mod protocol;
pub mod search;
pub mod text;
pub mod transform;

pub use error::{Error, Result};
