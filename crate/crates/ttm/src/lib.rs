//! Piecewise-linear complex dynamics of the twisted tent map family.
//!
//! The map scales by a complex parameter `c` and folds the plane upward
//! about the horizontal line `Im(z) = -1`. This crate provides the map
//! itself, exact boundary geometry of the filled-in invariant set,
//! classification of the parameter plane, escape-time and coded-coloring
//! rasterization, orbit experiments, and topological-entropy estimation.

pub mod checks;
pub mod entropy;
pub mod error;
pub mod geometry;
pub mod map;
pub mod orbit;
pub mod param;
pub mod raster;
pub mod regime;

pub use error::{Error, Result};
pub use map::{apply_c, reflect_fl, EscapeOutcome, EscapeVerdict, FoldResult};
pub use param::Parameter;
