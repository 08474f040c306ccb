//! Floorplan data structures, dataset conversion, prompt construction and
//! consistency metrics for structured floorplan generation.

pub mod bubble;
pub mod error;
pub mod geometry;
pub mod lenient;
pub mod metrics;
pub mod model;
pub mod num;
pub mod promptgen;
pub mod raster;
pub mod render;
pub mod rng;
pub mod scene;
pub mod synth;
pub mod validate;

pub use error::{Error, GeometryError, Result};
pub use geometry::{Polygon, Rect, Vertex};
pub use model::{Diagnostic, Floorplan, ParseOutcome, Room, Severity, VertexKey};
