//! Numerical kernels for the quantum and semiclassical Rabi models and
//! their rotating-wave approximations.
//!
//! The crate is `no_std` (with `alloc`). File formats, sweeps and the
//! command-line front end live in the companion `rabi` crate.

#![no_std]
// When std is linked elsewhere in the graph (tests, the CLI) the inherent
// float methods win over `num_traits::Float`, leaving its import unused.
#![allow(unused_imports)]

extern crate alloc;

pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod model;
pub mod spectrum;

pub use error::{Error, Result};

pub type C64 = num_complex::Complex64;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
