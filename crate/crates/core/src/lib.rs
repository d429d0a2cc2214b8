//! Sketch-to-BIM workbench core.
//!
//! Converts floor-plan sketches into a validated layout document, refines it
//! with controlled-language edit commands, scores it against ground truth and
//! compiles it into an ordered build plan executed into a mesh model.

pub mod bim;
pub mod edit;
pub mod eval;
pub mod extract;
pub mod gen;
pub mod geometry;
pub mod ids;
pub mod layout;
pub mod planar;
pub mod scalar;
pub mod session;
pub mod validate;

pub use geometry::{ArcGeom, GeomError, Point2};
pub use layout::{assign_canonical_ids, opening_world_span, Layout, Opening, OpeningClass, Room, Wall, WallShape};
pub use scalar::Scalar;

/// World-frame point in feet, as used by the layout document.
pub type Point = Point2<f64>;
/// Single-precision point for raster-side work.
pub type Point32 = Point2<f32>;
/// Arc geometry in document precision.
pub type Arc = ArcGeom<f64>;
