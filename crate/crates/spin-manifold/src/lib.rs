//! Command-line front end for `spin-manifold-core`: figure-ready sweeps of curvature
//! and speed, field optimisation, and the verification suite.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod report;

pub use config::{OutputFormat, Resolved, RunConfig};
pub use error::{CliError, Result};
