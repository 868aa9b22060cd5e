//! Figure reproductions, file output and the command-line interface for the
//! RWA-validity toolkit. The numerical kernels live in `rabi-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod fft;
pub mod output;
pub mod plot;
pub mod report;
pub mod sweep;

pub use error::{Error, Result};
