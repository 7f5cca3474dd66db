//! An exact, desk-scale verification workbench: fixpoint relational semantics
//! of a toy imperative language over finite state spaces, predicate
//! transformers and their Galois connections, decidable membership in
//! program-logic theories, fixpoint-induction certificate checkers, the
//! deductive-system (rules ⇄ fixpoints) correspondence, and checkers for two
//! derived proof systems (extended Hoare logic and the backward
//! possible-accessibility logic).

pub mod cli;
pub mod deduct;
pub mod galois;
pub mod induction;
pub mod lang;
pub mod proofs;
pub mod relsem;
pub mod space;
pub mod theories;
pub mod transformers;

pub use cli::run;
