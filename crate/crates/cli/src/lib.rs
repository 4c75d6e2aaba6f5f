//! Command-line front end for the `puiseux` library.

pub mod commands;
pub mod config;
pub mod report;
pub mod spec;

pub use spec::MonoidSpec;
