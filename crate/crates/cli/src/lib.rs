//! Command-line driver: argument parsing, config merging, CSV output and
//! preset figure grids on top of `bai_core`.

pub mod args;
pub mod commands;
pub mod figures;
pub mod records;

pub use commands::{dispatch, run};
