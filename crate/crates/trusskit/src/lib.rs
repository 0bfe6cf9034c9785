//! Compatibility conditions, rigidity and damage analysis for planar trusses.
//!
//! Numeric routines are generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`.

pub mod btp;
pub mod continuum;
pub mod damage;
pub mod development;
pub mod error;
pub mod geometry;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod rigidity;
pub mod scalar;
pub mod statics;
pub mod svg;
pub mod truss;
pub mod wagon;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Point = geometry::Point<f64>;
pub type Truss = truss::Truss<f64>;
pub type Edge = truss::Edge<f64>;
