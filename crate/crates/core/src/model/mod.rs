//! The canonical floorplan document.
//!
//! A [`Floorplan`] carries the stated numbers exactly as they appear in a
//! document; nothing here forces them to agree with the polygons. Use
//! [`derive_fields`] to build a self-consistent plan from geometry, and the
//! metrics module to measure how far a stated plan drifts from its geometry.

mod derive;
mod parse;
mod serialize;

use serde::Serialize;

use crate::geometry::Polygon;

pub use derive::{derive_fields, RoomGeometry};
pub use parse::{parse_lenient, parse_strict, ParseOutcome};
pub use serialize::{serialize, serialize_compact, to_json_value, VertexKey};

#[derive(Debug, Clone, PartialEq)]
pub struct Room {
    pub id: String,
    pub room_type: String,
    pub floor_polygon: Polygon,
    pub area: f64,
    pub height: f64,
    pub width: f64,
    pub is_regular: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Floorplan {
    pub room_count: u64,
    pub total_area: f64,
    pub room_types: Vec<String>,
    pub rooms: Vec<Room>,
    /// Unordered adjacency pairs of room ids.
    pub edges: Vec<(String, String)>,
}

impl Floorplan {
    pub fn room(&self, id: &str) -> Option<&Room> {
        self.rooms.iter().find(|r| r.id == id)
    }

    pub fn geometry(&self) -> Vec<RoomGeometry> {
        self.rooms
            .iter()
            .map(|r| RoomGeometry {
                id: r.id.clone(),
                room_type: r.room_type.clone(),
                polygon: r.floor_polygon.clone(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

/// One finding about a document, located by a `$`-rooted JSON path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub path: String,
    pub message: String,
}

impl Diagnostic {
    pub fn error(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn warning(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{sev}: {}: {}", self.path, self.message)
    }
}
