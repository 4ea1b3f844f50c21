//! Merlin–Arthur protocol for inner product, the binary encoding gadget,
//! and the reductions from exact inner product to approximate closest pair,
//! with brute-force oracles for every problem along the chain.

pub mod bits;
pub mod codes;
pub mod error;
pub mod gadget;
pub mod harness;
pub mod gf;
pub mod instance;
pub mod params;
pub mod protocol;
pub mod reduce;
pub mod solvers;

pub use bits::{BinaryVector, BitVector};
pub use error::{Error, Result};
