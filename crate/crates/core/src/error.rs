//! Error types shared across the engine.

use thiserror::Error;

/// Errors raised by circuit evaluation and manipulation.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("assignment is missing a value for variable '{0}'")]
    MissingVariable(String),
}

/// Errors raised by the SAT oracle.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    /// The configured conflict or wall-clock budget was exceeded.
    /// Distinct from UNSAT: no verdict was reached.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
}

/// Errors raised by BDD construction.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum BddError {
    #[error("BDD node table exceeded the size cap of {0} nodes")]
    SizeCapExceeded(usize),
}

/// Errors raised by the synthesis engine proper.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Bdd(#[from] BddError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    /// A model handed to counterexample extraction does not satisfy the
    /// error-formula invariants. Always indicates a bug upstream.
    #[error("malformed model: {0}")]
    MalformedModel(String),
}
