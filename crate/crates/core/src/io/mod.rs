//! Configuration files, output formats, plotting and the sweep driver.

pub mod config;
pub mod csv;
pub mod run;
pub mod svg;
pub mod sweep;
