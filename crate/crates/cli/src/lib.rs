//! File formats, run configuration and command implementations for the
//! `cfi` command-line tool built on `cfi-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod plot;
pub mod tagfile;

pub use config::RunConfig;
pub use error::{Result, ToolError};
