//! Entanglement certification for multimode continuous-variable states from
//! second moments.

#![forbid(unsafe_code)]

pub mod bounds;
pub mod error;
pub mod linalg;
pub mod partitions;
pub mod states;
pub mod witness;

pub use error::{Error, Result};
