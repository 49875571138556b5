//! Batch front-end for the harmonic-measure toolkit: scene files, reports and
//! figures.

pub mod commands;
pub mod error;
pub mod scene;
pub mod svg;

pub use error::CliError;
