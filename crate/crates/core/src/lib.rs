//! Numerical laboratory for the diffusive Lotka-Volterra prey-predator model
//! with two independent free boundaries.

pub mod analysis;
pub mod error;
pub mod fbm;
pub mod grid;
pub mod io;
pub mod logistic;
pub mod model;
pub mod semiwave;
pub mod stats;
pub mod thresholds;
pub mod tridiag;

pub use error::{Error, Result};
