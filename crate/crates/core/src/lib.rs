//! Two-dimensional U-bootstrap percolation.
//!
//! - [`geometry`]: stable directions, classification and witness directions of update families.
//! - [`dynamics`]: closure and stepping on finite grids.
//! - [`montecarlo`]: reproducible sampling and critical probability estimates.
//! - [`covers`]: multi-scale tilings, barriers, triangular covers and the lower-bound certificate.
//! - [`family_file`]: the text format for update families.

pub mod covers;
pub mod dynamics;
pub mod family_file;
pub mod geometry;
pub mod lattice;
pub mod montecarlo;
