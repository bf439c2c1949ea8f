//! Symbolic calculus on odd symplectic supermanifolds.

pub mod bv;
pub mod cli;
pub mod darboux;
pub mod error;
pub mod flows;
pub mod forms;
pub mod sampling;
pub mod superalgebra;
pub mod surfaces;
pub mod symplectic;

pub use error::{Error, Result};
pub use superalgebra::*;
