//! Generalized difference families over finite abelian groups, and exact
//! evaluation of weak and strong algebraic manipulation detection (AMD)
//! codes built from them.
//!
//! The crate is organised bottom-up:
//!
//! - [`group`]: finite abelian groups as products of cyclic groups, plus finite
//!   fields for the cyclotomic construction.
//! - [`diffcore`]: multiset difference operators and frequency maps.
//! - [`families`]: verifiers for the nine family types and their implication
//!   lattice.
//! - [`constructions`]: deterministic builders for known families.
//! - [`amd`]: AMD codes, adversary games, bounds and optimality.
//! - [`search`]: exhaustive backtracking search with nonexistence certificates.
//! - [`cli`]: the `diffam` command-line front end.
//!
//! All probabilities are exact [`Rational`]s.

pub mod amd;
pub mod cli;
pub mod constructions;
pub mod corpus;
pub mod diffcore;
mod error;
pub mod families;
pub mod group;
pub mod json;
mod rational;
pub mod search;

pub use error::{Error, Result};
pub use rational::Rational;
