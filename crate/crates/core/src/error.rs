use thiserror::Error;

use crate::protocol::RejectReason;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("zero has no multiplicative inverse")]
    ZeroInverse,

    #[error("codeword length {n} exceeds field size {field_size}; need a field of size at least {n}")]
    FieldTooSmall { n: usize, field_size: u64 },

    #[error("parameter regime unrealizable: {0}")]
    Unrealizable(String),

    #[error("planner did not converge after {rounds} rounds (last T = {last_block_width}, L = {last_bits} bits, budget {budget:.3} bits)")]
    NonConvergence {
        rounds: u32,
        last_block_width: u64,
        last_bits: u64,
        budget: f64,
    },

    #[error("message rejected by Alice: {0}")]
    Rejected(RejectReason),

    #[error("edit gadget validation failed: ED({left}, {right}) = {edit} but expected {expected}")]
    EditGadget {
        left: String,
        right: String,
        edit: u64,
        expected: u64,
    },

    #[error("oracle violated its additive contract: reported {reported}, exact optimum {exact}, slack {slack}")]
    OracleContract { reported: u64, exact: u64, slack: u64 },

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("empty instance")]
    Empty,

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
