//! Specification and Skolem-function file formats.

pub mod aiger;
pub mod qdimacs;
pub mod verilog;

pub use aiger::{
    parse_aiger, skolem_from_aiger, spec_from_aiger, write_circuit_aiger, write_skolem_aiger,
    AigerError, AigerFile,
};
pub use qdimacs::{parse_qdimacs, QdimacsError};
pub use verilog::write_skolem_verilog;
