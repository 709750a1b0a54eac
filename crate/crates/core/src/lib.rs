//! Balanced incomplete block designs and their incidence bounds.
//!
//! The crate builds designs (including the design of points and m-flats of an
//! affine space over a finite field), measures exact incidence statistics on
//! subsets of points and blocks, computes the spectrum of the point-block
//! incidence graph, and checks the spectral incidence bounds and the
//! distinct-triangle-areas pipeline over F_q^2 against measured values.

pub mod bounds;
pub mod design;
pub mod error;
pub mod field;
pub mod geometry;
pub mod rational;
pub mod spectral;
pub mod subsets;
pub mod triangles;

pub use design::{Design, DesignParams, SubsetPair};
pub use error::{BoundError, DesignError, FieldError, GeometryError, SpectralError, TriangleError};
pub use field::{FieldElement, FiniteField};
pub use geometry::{Flat, GeometryParams, Point};
