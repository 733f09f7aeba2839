pub mod cli;
pub mod cluster;
pub mod error;
pub mod eval;
pub mod linalg;
pub mod solver;
pub mod synth;

pub use error::{LrrError, Result};
