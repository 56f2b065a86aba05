//! Partition semantics of questions over first-order logic.
//!
//! Questions denote partitions of a space of worlds. This crate decides
//! question entailment by reduction to classical logic, checks answerhood
//! syntactically (developments), and generates answers from a theory with a
//! free-variable tableau that carries an Add Instance rule.

pub mod development;
pub mod error;
pub mod oracle;
pub mod problem;
pub mod prover;
pub mod qa;
pub mod syntax;
pub mod translation;

pub use error::*;
pub use syntax::{Formula, Question, Rigidity, Signature, Substitution, Term, Var};
