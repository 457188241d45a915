#![allow(clippy::needless_range_loop)]

pub mod builtin;
pub mod characters;
pub mod cli;
pub mod error;
pub mod isometry;
pub mod lattice;
pub mod linalg;
pub mod modular;
pub mod qseries;
pub mod transforms;
pub mod weil;

pub use error::{OrbiError, Result};
