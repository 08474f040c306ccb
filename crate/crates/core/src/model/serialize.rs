use serde_json::{Map, Value};

use crate::num::json_number;

use super::Floorplan;

/// Spelling of the second vertex coordinate on output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VertexKey {
    #[default]
    Y,
    Z,
}

impl VertexKey {
    pub fn as_str(self) -> &'static str {
        match self {
            VertexKey::Y => "y",
            VertexKey::Z => "z",
        }
    }
}

/// Builds the document tree with canonical key order: top-level fields in
/// document order, per-room fields alphabetical. `edges` is written only
/// when non-empty.
pub fn to_json_value(fp: &Floorplan, key: VertexKey) -> Value {
    let mut top = Map::new();
    top.insert("room_count".into(), Value::from(fp.room_count));
    top.insert("total_area".into(), json_number(fp.total_area));
    top.insert(
        "room_types".into(),
        Value::Array(fp.room_types.iter().cloned().map(Value::String).collect()),
    );
    let rooms = fp
        .rooms
        .iter()
        .map(|r| {
            let mut m = Map::new();
            m.insert("area".into(), json_number(r.area));
            let poly = r
                .floor_polygon
                .vertices()
                .iter()
                .map(|v| {
                    let mut pm = Map::new();
                    pm.insert("x".into(), json_number(v.x));
                    pm.insert(key.as_str().into(), json_number(v.y));
                    Value::Object(pm)
                })
                .collect();
            m.insert("floor_polygon".into(), Value::Array(poly));
            m.insert("height".into(), json_number(r.height));
            m.insert("id".into(), Value::String(r.id.clone()));
            m.insert("is_regular".into(), Value::from(u8::from(r.is_regular)));
            m.insert("room_type".into(), Value::String(r.room_type.clone()));
            m.insert("width".into(), json_number(r.width));
            Value::Object(m)
        })
        .collect();
    top.insert("rooms".into(), Value::Array(rooms));
    if !fp.edges.is_empty() {
        let edges = fp
            .edges
            .iter()
            .map(|(a, b)| Value::Array(vec![Value::String(a.clone()), Value::String(b.clone())]))
            .collect();
        top.insert("edges".into(), Value::Array(edges));
    }
    Value::Object(top)
}

/// Pretty-printed document with two-space indentation.
pub fn serialize(fp: &Floorplan, key: VertexKey) -> String {
    serde_json::to_string_pretty(&to_json_value(fp, key)).expect("floorplan values serialize")
}

/// Single-line document, as written to JSON-lines files.
pub fn serialize_compact(fp: &Floorplan, key: VertexKey) -> String {
    serde_json::to_string(&to_json_value(fp, key)).expect("floorplan values serialize")
}
