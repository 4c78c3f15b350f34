//! Numerical laboratory for shift and convolution operators acting on
//! weighted L^2 spaces over the half line, discretized on uniform grids.

pub mod error;
pub mod grid;
pub mod io;
pub mod linalg;
pub mod operators;
pub mod spectra;
pub mod symbols;
pub mod weights;

pub use error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex<f64>;
