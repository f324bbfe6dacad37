//! File formats, reports and the command-line front end for `qhecke-core`.

pub mod cli;
pub mod formats;
pub mod report;

pub use cli::{execute, Execution};
