pub mod classify;
pub mod cli;
pub mod error;
pub mod flow;
pub mod numerics;
pub mod pattern;
pub mod realize;
pub mod verify;

pub use error::{Error, Result};
pub use numerics::{DenseMatrix, SigmaList};
