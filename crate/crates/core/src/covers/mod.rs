//! Multi-scale tilings, barriers and triangular covers, and the lower-bound certificate.
//!
//! Everything here runs at toy parameters. Constructions are validated definitionally
//! (slopes, tubes, closedness by simulation) instead of relying on probabilistic bounds,
//! so `NoCleanSite` and `WaypointNotFound` are ordinary outcomes.

mod barrier;
mod certificate;
mod cover;
mod demo;
mod layout;
mod params;
mod tiling;

use thiserror::Error;

use crate::geometry::{Classification, GeometryError};
use crate::lattice::Site;

pub use barrier::{build_barrier, slope_deviation, validate_barrier, Barrier};
pub use certificate::{certify, final_bound_holds, Certificate};
pub use cover::{build_cover, stays_fixed, verify_closed, TriangularCover};
pub use demo::{overlay_ppm, run_cover_demo, CoverSummary, DemoReport};
pub use layout::{cover_layout, ell0, epsilon0, r_epsilon, CoverLayout};
pub use params::{delta_exponent, RenormParams};
pub use tiling::{bad_fraction_check, build_hierarchy, BadFractionReport, Square, TilingHierarchy};

/// Slack used for every floating point angle comparison.
pub const ANGLE_SLACK: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoverError {
    #[error("parameter order violated: {0}")]
    ParameterOrderViolation(String),
    #[error("region {width}x{height} is not a multiple of the top side length {delta}")]
    RegionNotAligned { width: usize, height: usize, delta: u64 },
    #[error("no clean site at level {level} in square ({}, {})", square.0, square.1)]
    NoCleanSite { level: usize, square: (i64, i64) },
    #[error("segment {from} -> {to} deviates {deviation:.6} rad from the side direction, bound {bound:.6}")]
    SlopeViolation { from: Site, to: Site, deviation: f64, bound: f64 },
    #[error("no detour waypoint found: {0}")]
    WaypointNotFound(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("epsilon {epsilon:.6} exceeds epsilon0 {epsilon0:.6}")]
    EpsilonTooLarge { epsilon: f64, epsilon0: f64 },
    #[error("layout check failed: {0}")]
    LayoutInvalid(String),
    #[error("covered set is not strictly inside the cover")]
    NotEnclosed,
    #[error("new level-{level} cover overlaps registered level-{other} cover without nesting")]
    NestingViolation { level: usize, other: usize },
    #[error("family is {0}, not subcritical")]
    NotSubcritical(Classification),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
