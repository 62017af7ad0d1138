//! Exact state-vector simulation of coined quantum walks used as a
//! resource for remote preparation of a two-qubit product state.

pub mod error;
pub mod fixtures;
pub mod hilbert;
pub mod measurement;
pub mod operators;
pub mod protocol;
pub mod tables;
pub mod tolerance;
pub mod walks;

pub use error::{Error, Result};
