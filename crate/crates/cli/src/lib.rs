//! Document loading, commands and reports for the `subcat` binary.

pub mod commands;
pub mod corpus;
pub mod doc;
pub mod render;
pub mod workspace;

pub use commands::{run, Outcome, EXIT_INVALID, EXIT_OK, EXIT_PROPERTY};
