//! Library side of the `galqr` command-line tool.

pub mod commands;
pub mod config;
pub mod input;
pub mod manifest;

pub use commands::{run, Cli};
