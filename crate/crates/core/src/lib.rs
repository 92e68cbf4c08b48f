//! Exact invariants of quantum torus categories on oriented surfaces.

pub mod cli;
pub mod cochain;
pub mod error;
pub mod forms;
pub mod frac;
pub mod global;
pub mod lattice;
pub mod localcat;
pub mod surface;

pub use error::{Error, Result};
pub use frac::Frac1;
