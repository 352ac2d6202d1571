//! Hybrid function representation (HFRep) toolkit.
//!
//! Constructive FRep objects are turned into smooth, signed, distance-like
//! fields: the zero level is located, an unsigned distance is computed by
//! one of several routes, smoothed with a C¹ interpolant, and finally
//! multiplied by a sigmoid of the FRep value to restore the sign.

pub mod adf;
pub mod attributes;
pub mod cubic;
pub mod dt;
pub mod eikonal;
pub mod error;
pub mod frep;
pub mod grid;
pub mod idf;
pub mod io;
pub mod pipeline;

pub use error::{HfrepError, Result};
pub use grid::{BoundingBox, ContinuityClass, Point, ScalarGrid};
