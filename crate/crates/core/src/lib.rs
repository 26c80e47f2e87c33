//! Bias and quadratic-bias invariants of finite (G,n)-complexes, their
//! obstruction groups, and certificates for unitary lifting.

pub mod doubling;
pub mod error;
pub mod forms;
pub mod foxbias;
pub mod grouphom;
pub mod groupring;
pub mod intlin;
pub mod numfn;
pub mod obstruction;
pub mod unitary;
pub mod units;

pub use error::{Error, Result};
pub use intlin::{IntMatrix, SnfResult};
