//! Sketch-to-layout extraction.
//!
//! A fixed geometric pipeline: ink detection, deskew, scale, segment
//! detection, orientation clustering, merging, stub pruning, arcs,
//! openings, rooms and canonical ids.

pub mod arcs;
pub mod bundle;
pub mod merge;
pub mod openings;
pub mod orient;
pub mod pipeline;
pub mod raster;
pub mod rooms;
pub mod scale;
pub mod segments;
pub mod topology;

pub use bundle::{DimensionCallout, Gray, LabelClass, LabelMark, RasterDoc, SketchBundle};
pub use orient::{cluster_orientations, OrientationModel};
pub use pipeline::{extract_layout, summarize, ExtractOptions, Extraction, ExtractionAgent, GeometricExtractor, StageError, StageRecord};
pub use raster::{binarize, Ink};
pub use scale::estimate_scale;
pub use segments::{estimate_skew, split_at_junctions, Frame, Segment};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtractError {
    #[error("invalid bundle: {0}")]
    Bundle(String),
    #[error("no ink in the raster")]
    EmptyImage,
    #[error("no dimension callouts and no assumed scale")]
    NoScaleAnnotation,
    #[error("walls do not enclose any room")]
    NoBoundedFace,
}
