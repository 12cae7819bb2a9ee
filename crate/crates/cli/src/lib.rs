//! Config-driven experiment runner for the `okounkov` library.

pub mod config;
pub mod emit;
pub mod pipeline;

/// Environment variable naming the artifact output directory.
pub const OUT_DIR_VAR: &str = "OKOUNKOV_OUT";
