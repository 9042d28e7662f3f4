//! Semantics engine for propositional choice programs.
//!
//! Programs are evaluated with four non-deterministic approximation
//! operators (GZ, LPST, MR and the ultimate operator). On top of them the
//! crate computes supported and three-valued fixpoints, minimality-based and
//! constructive stable fixpoints, and three groundedness notions. Disjunctive
//! programs are handled through their translation into choice programs.

pub mod cli;
pub mod error;
pub mod evaluation;
pub mod groundedness;
pub mod json;
pub mod lattice;
pub mod limits;
pub mod operators;
pub mod oracles;
pub mod parser;
pub mod semantics;
pub mod syntax;

pub use error::{Error, Result};
pub use lattice::{AtomSet, AtomSetFamily, Pair, Signature};
pub use limits::Limits;
pub use operators::{Approximator, NdaoOutput, OperatorKind};
pub use syntax::{ChoiceAtom, ChoiceProgram, ChoiceRule, DisjunctiveProgram, DisjunctiveRule};
