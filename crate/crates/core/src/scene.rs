//! Conversion of scene records (rooms as metric coordinate lists) into
//! floorplans.
//!
//! A record is one JSON object per line:
//!
//! ```json
//! {"id": "house-0", "rooms": [{"id": "room|4", "room_type": "Bedroom",
//!   "floor_polygon": [{"x": 0, "z": 0}, {"x": 0, "z": 6.4}, ...]}]}
//! ```
//!
//! `roomType` / `floorPolygon` spellings are accepted as well. The planar
//! second coordinate is read from `z`, falling back to `y` when a vertex has
//! no `z`.

use serde::Deserialize;
use serde_json::Value;

use crate::bubble;
use crate::error::{Error, Result};
use crate::geometry::{self, Polygon, Vertex};
use crate::model::{derive_fields, Diagnostic, Floorplan, RoomGeometry};
use crate::num::round1;

/// Default adjacency threshold for scene sources, in length units.
pub const SCENE_ADJACENCY_THRESHOLD: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SceneRoom {
    pub id: String,
    pub room_type: String,
    pub polygon: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneRecord {
    pub id: Option<String>,
    pub rooms: Vec<SceneRoom>,
}

#[derive(Deserialize)]
struct RawRecord {
    #[serde(default)]
    id: Option<Value>,
    rooms: Vec<RawRoom>,
}

#[derive(Deserialize)]
struct RawRoom {
    id: Value,
    #[serde(alias = "roomType")]
    room_type: String,
    #[serde(alias = "floorPolygon")]
    floor_polygon: Vec<RawPoint>,
}

#[derive(Deserialize)]
struct RawPoint {
    x: f64,
    #[serde(default)]
    y: Option<f64>,
    #[serde(default)]
    z: Option<f64>,
}

fn id_string(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl SceneRecord {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawRecord = serde_json::from_str(text).map_err(|e| Error::Scene(e.to_string()))?;
        let mut rooms = Vec::with_capacity(raw.rooms.len());
        for (i, r) in raw.rooms.into_iter().enumerate() {
            let mut polygon = Vec::with_capacity(r.floor_polygon.len());
            for p in r.floor_polygon {
                let second = p.z.or(p.y).ok_or_else(|| {
                    Error::Scene(format!("rooms[{i}]: vertex has neither \"z\" nor \"y\""))
                })?;
                polygon.push((p.x, second));
            }
            rooms.push(SceneRoom {
                id: id_string(&r.id),
                room_type: r.room_type,
                polygon,
            });
        }
        Ok(SceneRecord {
            id: raw.id.as_ref().map(id_string),
            rooms,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneConversion {
    pub floorplan: Floorplan,
    /// One warning per skipped room.
    pub diagnostics: Vec<Diagnostic>,
}

/// Rounds coordinates to one decimal, removes redundant points, derives the
/// remaining fields and computes adjacency edges. Rooms that degenerate
/// after rounding are skipped with a diagnostic.
pub fn convert_scene(s: &SceneRecord, adjacency_threshold: f64) -> Result<SceneConversion> {
    let mut diagnostics = Vec::new();
    let mut rooms = Vec::with_capacity(s.rooms.len());
    for (i, room) in s.rooms.iter().enumerate() {
        let path = format!("$.rooms[{i}]");
        let ring: Vec<Vertex> = room
            .polygon
            .iter()
            .map(|&(x, y)| Vertex::new(round1(x), round1(y)))
            .collect();
        let simplified = Polygon::new(ring).and_then(|p| geometry::simplify_collinear(&p));
        match simplified {
            Ok(polygon) => rooms.push(RoomGeometry {
                id: room.id.clone(),
                room_type: room.room_type.clone(),
                polygon,
            }),
            Err(e) => diagnostics.push(Diagnostic::warning(
                path,
                format!("room {:?} skipped: {e}", room.id),
            )),
        }
    }
    let mut floorplan = derive_fields(rooms)?;
    floorplan.edges = bubble::extract_bubble(&floorplan, adjacency_threshold).edge_list();
    Ok(SceneConversion {
        floorplan,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(id: &str, x0: f64, y0: f64, x1: f64, y1: f64) -> SceneRoom {
        SceneRoom {
            id: id.into(),
            room_type: "Bedroom".into(),
            polygon: vec![(x0, y0), (x0, y1), (x1, y1), (x1, y0)],
        }
    }

    #[test]
    fn single_room() {
        let s = SceneRecord {
            id: None,
            rooms: vec![rect("room|1", 0.0, 0.0, 6.4, 6.4)],
        };
        let out = convert_scene(&s, SCENE_ADJACENCY_THRESHOLD).unwrap();
        assert_eq!(out.floorplan.room_count, 1);
        assert_eq!(out.floorplan.total_area, 41.0);
        assert!(out.diagnostics.is_empty());
    }

    #[test]
    fn redundant_point_removed() {
        let s = SceneRecord {
            id: None,
            rooms: vec![SceneRoom {
                id: "a".into(),
                room_type: "Kitchen".into(),
                polygon: vec![(0.0, 0.0), (0.0, 1.5), (0.0, 3.0), (2.0, 3.0), (2.0, 0.0)],
            }],
        };
        let out = convert_scene(&s, 2.0).unwrap();
        assert_eq!(out.floorplan.rooms[0].floor_polygon.len(), 4);
    }

    #[test]
    fn rounding_creates_collinearity() {
        let s = SceneRecord {
            id: None,
            rooms: vec![SceneRoom {
                id: "a".into(),
                room_type: "Kitchen".into(),
                polygon: vec![
                    (0.0, 0.0),
                    (0.01, 1.5),
                    (0.0, 3.0),
                    (2.04, 3.0),
                    (1.96, 0.0),
                ],
            }],
        };
        let out = convert_scene(&s, 2.0).unwrap();
        let r = &out.floorplan.rooms[0];
        assert_eq!(r.floor_polygon.len(), 4);
        assert!(r.is_regular);
        assert_eq!(r.area, 6.0);
    }

    #[test]
    fn threshold_two_inclusive() {
        let near = SceneRecord {
            id: None,
            rooms: vec![rect("a", 0.0, 0.0, 2.0, 2.0), rect("b", 3.5, 0.0, 5.0, 2.0)],
        };
        assert_eq!(convert_scene(&near, 2.0).unwrap().floorplan.edges.len(), 1);
        let far = SceneRecord {
            id: None,
            rooms: vec![rect("a", 0.0, 0.0, 2.0, 2.0), rect("b", 4.5, 0.0, 6.0, 2.0)],
        };
        assert!(convert_scene(&far, 2.0).unwrap().floorplan.edges.is_empty());
    }

    #[test]
    fn degenerate_room_skipped() {
        let s = SceneRecord {
            id: None,
            rooms: vec![
                rect("ok", 0.0, 0.0, 1.0, 1.0),
                SceneRoom {
                    id: "thin".into(),
                    room_type: "Hall".into(),
                    polygon: vec![(0.0, 0.0), (0.02, 0.0), (0.02, 5.0), (0.0, 5.0)],
                },
            ],
        };
        let out = convert_scene(&s, 2.0).unwrap();
        assert_eq!(out.floorplan.rooms.len(), 1);
        assert_eq!(out.diagnostics.len(), 1);
        assert!(out.diagnostics[0].message.contains("thin"));
    }

    #[test]
    fn parses_both_spellings() {
        let a = SceneRecord::from_json(
            r#"{"id": 7, "rooms": [{"id": "r", "roomType": "Bath", "floorPolygon": [{"x": 0, "y": 0, "z": 1}, {"x": 1, "y": 0, "z": 1}, {"x": 1, "y": 0, "z": 2}]}]}"#,
        )
        .unwrap();
        assert_eq!(a.id.as_deref(), Some("7"));
        assert_eq!(a.rooms[0].polygon[0], (0.0, 1.0));
        let b = SceneRecord::from_json(
            r#"{"rooms": [{"id": "r", "room_type": "Bath", "floor_polygon": [{"x": 0, "y": 1}, {"x": 1, "y": 1}, {"x": 1, "y": 2}]}]}"#,
        )
        .unwrap();
        assert_eq!(a.rooms, b.rooms);
        assert!(SceneRecord::from_json("{\"rooms\": [").is_err());
    }

    #[test]
    fn idempotent_on_canonical_input() {
        let s = SceneRecord {
            id: None,
            rooms: vec![rect("a", 0.0, 0.0, 2.5, 3.1), rect("b", 2.5, 0.0, 4.0, 3.1)],
        };
        let first = convert_scene(&s, 2.0).unwrap().floorplan;
        let again = SceneRecord {
            id: None,
            rooms: first
                .rooms
                .iter()
                .map(|r| SceneRoom {
                    id: r.id.clone(),
                    room_type: r.room_type.clone(),
                    polygon: r
                        .floor_polygon
                        .vertices()
                        .iter()
                        .map(|v| (v.x, v.y))
                        .collect(),
                })
                .collect(),
        };
        assert_eq!(convert_scene(&again, 2.0).unwrap().floorplan, first);
    }
}
