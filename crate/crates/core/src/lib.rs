//! Boolean functional synthesis: given a relational specification F(X, Y)
//! over outputs X and inputs Y, synthesize functions psi_i(Y) such that
//! F(psi(Y), Y) holds whenever some X satisfies F(X, Y).
//!
//! The engine runs in two phases. Phase 1 is polynomial relative to the
//! SAT oracle: unate outputs get constant functions, the rest get
//! candidates built by constant substitution into a renamed NNF form of
//! the specification, and an error formula certifies the result. When the
//! renamed form is weakly decomposable the candidates are exact; a second
//! pipeline routes the specification through a reduced ordered BDD to
//! obtain such a form. Phase 2 repairs failing candidates by
//! counterexample-guided cube patching until the error formula is
//! unsatisfiable.

pub mod bdd;
pub mod benchgen;
pub mod circuit;
pub mod engine;
pub mod error;
pub mod frontend;
pub mod goodness;
pub mod nnf;
pub mod phase1;
pub mod phase2;
pub mod report;
pub mod sat;
pub mod unate;

pub use circuit::{Assignment, Dag, Node, NodeRef, Spec, VarId};
pub use engine::{synthesize, verify, Pipeline, SynthOptions, SynthResult, SynthStatus};
pub use error::{BddError, CircuitError, EngineError, OracleError};
