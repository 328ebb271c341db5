//! Axiom checks, angle conditions, embeddings and counterexample search.

pub mod axioms;
pub mod conditions;
pub mod embedding;
pub mod search;
pub mod simplex;
pub mod tau;
