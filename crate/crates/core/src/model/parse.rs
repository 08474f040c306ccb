use serde_json::{Map, Value};

use crate::geometry::{self, Polygon, Vertex};
use crate::lenient;

use super::{Diagnostic, Floorplan, Room};

#[derive(Debug, Clone, PartialEq)]
pub struct ParseOutcome {
    pub floorplan: Option<Floorplan>,
    pub diagnostics: Vec<Diagnostic>,
    /// Lenient extraction stripped prose, template tokens or Python quoting.
    pub recovered: bool,
}

impl ParseOutcome {
    fn failed(diagnostics: Vec<Diagnostic>, recovered: bool) -> Self {
        debug_assert!(diagnostics.iter().any(Diagnostic::is_error));
        Self {
            floorplan: None,
            diagnostics,
            recovered,
        }
    }

    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.is_error())
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    Strict,
    Lenient,
}

const TOP_KEYS: [&str; 5] = ["room_count", "total_area", "room_types", "rooms", "edges"];
const ROOM_KEYS: [&str; 7] = [
    "area",
    "floor_polygon",
    "height",
    "id",
    "is_regular",
    "room_type",
    "width",
];

/// Parses a canonical floorplan document.
pub fn parse_strict(text: &str) -> ParseOutcome {
    parse_text(text, Mode::Strict, false)
}

/// Parses raw model output: the first balanced object is extracted, Python
/// quoting is normalized, and rooms with degenerate polygons are dropped
/// with a warning instead of failing the document.
pub fn parse_lenient(text: &str) -> ParseOutcome {
    match lenient::extract_object(text) {
        Some(ex) => parse_text(&ex.json, Mode::Lenient, ex.recovered),
        None => ParseOutcome::failed(
            vec![Diagnostic::error("$", "no balanced object found in text")],
            false,
        ),
    }
}

fn parse_text(text: &str, mode: Mode, recovered: bool) -> ParseOutcome {
    let value: Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(e) => {
            let offset = byte_offset(text, e.line(), e.column());
            return ParseOutcome::failed(
                vec![Diagnostic::error(
                    "$",
                    format!("malformed JSON at byte {offset}: {e}"),
                )],
                recovered,
            );
        }
    };
    let mut p = Parser {
        mode,
        diags: Vec::new(),
    };
    let fp = p.floorplan(&value);
    let failed = p.diags.iter().any(Diagnostic::is_error);
    ParseOutcome {
        floorplan: if failed { None } else { fp },
        diagnostics: p.diags,
        recovered,
    }
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let line_start: usize = text
        .split_inclusive('\n')
        .take(line - 1)
        .map(str::len)
        .sum();
    (line_start + column.saturating_sub(1)).min(text.len())
}

struct Parser {
    mode: Mode,
    diags: Vec<Diagnostic>,
}

impl Parser {
    fn error(&mut self, path: &str, msg: impl Into<String>) {
        self.diags.push(Diagnostic::error(path, msg));
    }

    fn warn(&mut self, path: &str, msg: impl Into<String>) {
        self.diags.push(Diagnostic::warning(path, msg));
    }

    fn unknown_keys(&mut self, obj: &Map<String, Value>, known: &[&str], path: &str) {
        for k in obj.keys() {
            if !known.contains(&k.as_str()) {
                self.warn(&format!("{path}.{k}"), "unknown field ignored");
            }
        }
    }

    fn required<'v>(
        &mut self,
        obj: &'v Map<String, Value>,
        key: &str,
        path: &str,
    ) -> Option<&'v Value> {
        let v = obj.get(key);
        if v.is_none() {
            self.error(&format!("{path}.{key}"), "missing required field");
        }
        v
    }

    fn number(&mut self, v: &Value, path: &str) -> Option<f64> {
        match v.as_f64() {
            Some(x) if x.is_finite() => Some(x),
            _ => {
                self.error(path, "expected a number");
                None
            }
        }
    }

    fn count(&mut self, v: &Value, path: &str) -> Option<u64> {
        if let Some(n) = v.as_u64() {
            return Some(n);
        }
        match v.as_f64() {
            Some(x) if x >= 0.0 && x.fract() == 0.0 => Some(x as u64),
            _ => {
                self.error(path, "expected a nonnegative integer");
                None
            }
        }
    }

    fn string(&mut self, v: &Value, path: &str) -> Option<String> {
        match v.as_str() {
            Some(s) => Some(s.to_string()),
            None => {
                self.error(path, "expected a string");
                None
            }
        }
    }

    fn flag(&mut self, v: &Value, path: &str) -> Option<bool> {
        match v {
            Value::Bool(b) => Some(*b),
            Value::Number(n) if n.as_f64() == Some(0.0) => Some(false),
            Value::Number(n) if n.as_f64() == Some(1.0) => Some(true),
            _ => {
                self.error(path, "expected a boolean or 0/1");
                None
            }
        }
    }

    fn floorplan(&mut self, v: &Value) -> Option<Floorplan> {
        let Some(obj) = v.as_object() else {
            self.error("$", "expected a JSON object");
            return None;
        };
        self.unknown_keys(obj, &TOP_KEYS, "$");

        let room_count = self
            .required(obj, "room_count", "$")
            .and_then(|v| self.count(v, "$.room_count"));
        let total_area = self
            .required(obj, "total_area", "$")
            .and_then(|v| self.number(v, "$.total_area"));
        let room_types = self
            .required(obj, "room_types", "$")
            .and_then(|v| self.string_list(v, "$.room_types"));
        let rooms = self.required(obj, "rooms", "$").and_then(|v| self.rooms(v));
        let edges = match obj.get("edges") {
            Some(v) => self.edges(v),
            None => Some(Vec::new()),
        };

        let fp = Floorplan {
            room_count: room_count?,
            total_area: total_area?,
            room_types: room_types?,
            rooms: rooms?,
            edges: edges?,
        };
        for (i, (a, b)) in fp.edges.iter().enumerate() {
            for id in [a, b] {
                if fp.room(id).is_none() {
                    self.warn(
                        &format!("$.edges[{i}]"),
                        format!("edge refers to unknown room id {id:?}"),
                    );
                }
            }
        }
        Some(fp)
    }

    fn string_list(&mut self, v: &Value, path: &str) -> Option<Vec<String>> {
        let Some(arr) = v.as_array() else {
            self.error(path, "expected an array of strings");
            return None;
        };
        let mut out = Vec::with_capacity(arr.len());
        let mut ok = true;
        for (i, item) in arr.iter().enumerate() {
            match self.string(item, &format!("{path}[{i}]")) {
                Some(s) => out.push(s),
                None => ok = false,
            }
        }
        ok.then_some(out)
    }

    fn edges(&mut self, v: &Value) -> Option<Vec<(String, String)>> {
        let Some(arr) = v.as_array() else {
            self.error("$.edges", "expected an array of id pairs");
            return None;
        };
        let mut out = Vec::new();
        let mut ok = true;
        for (i, e) in arr.iter().enumerate() {
            let path = format!("$.edges[{i}]");
            match e.as_array().map(Vec::as_slice) {
                Some([a, b]) => match (a.as_str(), b.as_str()) {
                    (Some(a), Some(b)) => out.push((a.to_string(), b.to_string())),
                    _ => {
                        self.error(&path, "edge endpoints must be strings");
                        ok = false;
                    }
                },
                _ => {
                    self.error(&path, "expected a pair of room ids");
                    ok = false;
                }
            }
        }
        ok.then_some(out)
    }

    fn rooms(&mut self, v: &Value) -> Option<Vec<Room>> {
        let Some(arr) = v.as_array() else {
            self.error("$.rooms", "expected an array of rooms");
            return None;
        };
        let mut out = Vec::with_capacity(arr.len());
        let mut ok = true;
        for (i, r) in arr.iter().enumerate() {
            match self.room(r, &format!("$.rooms[{i}]")) {
                RoomResult::Room(room) => out.push(room),
                RoomResult::Skipped => {}
                RoomResult::Failed => ok = false,
            }
        }
        ok.then_some(out)
    }

    fn room(&mut self, v: &Value, path: &str) -> RoomResult {
        let Some(obj) = v.as_object() else {
            self.error(path, "expected a room object");
            return RoomResult::Failed;
        };
        self.unknown_keys(obj, &ROOM_KEYS, path);
        let area = self
            .required(obj, "area", path)
            .and_then(|v| self.number(v, &format!("{path}.area")));
        let height = self
            .required(obj, "height", path)
            .and_then(|v| self.number(v, &format!("{path}.height")));
        let width = self
            .required(obj, "width", path)
            .and_then(|v| self.number(v, &format!("{path}.width")));
        let id = self
            .required(obj, "id", path)
            .and_then(|v| self.string(v, &format!("{path}.id")));
        let room_type = self
            .required(obj, "room_type", path)
            .and_then(|v| self.string(v, &format!("{path}.room_type")));
        let is_regular = self
            .required(obj, "is_regular", path)
            .and_then(|v| self.flag(v, &format!("{path}.is_regular")));
        let polygon = match self.required(obj, "floor_polygon", path) {
            Some(v) => self.polygon(v, &format!("{path}.floor_polygon")),
            None => PolygonResult::Failed,
        };

        let floor_polygon = match polygon {
            PolygonResult::Ok(p) => p,
            PolygonResult::Degenerate => return RoomResult::Skipped,
            PolygonResult::Failed => return RoomResult::Failed,
        };
        match (area, height, width, id, room_type, is_regular) {
            (
                Some(area),
                Some(height),
                Some(width),
                Some(id),
                Some(room_type),
                Some(is_regular),
            ) => RoomResult::Room(Room {
                id,
                room_type,
                floor_polygon,
                area,
                height,
                width,
                is_regular,
            }),
            _ => RoomResult::Failed,
        }
    }

    fn polygon(&mut self, v: &Value, path: &str) -> PolygonResult {
        let Some(arr) = v.as_array() else {
            self.error(path, "expected an array of vertices");
            return PolygonResult::Failed;
        };
        let mut ring = Vec::with_capacity(arr.len());
        let mut ok = true;
        for (i, vert) in arr.iter().enumerate() {
            let vpath = format!("{path}[{i}]");
            match self.vertex(vert, &vpath) {
                Some(p) => ring.push(p),
                None => ok = false,
            }
        }
        if !ok {
            return PolygonResult::Failed;
        }
        if ring.len() < 3 {
            self.error(
                path,
                format!("polygon needs at least 3 vertices, got {}", ring.len()),
            );
            return PolygonResult::Failed;
        }
        let polygon = match Polygon::new(ring) {
            Ok(p) => p,
            Err(e) => {
                self.error(path, e.to_string());
                return PolygonResult::Failed;
            }
        };
        if geometry::simplify_collinear(&polygon).is_err() {
            let msg =
                "degenerate polygon (fewer than 3 distinct non-collinear vertices or zero area)";
            return match self.mode {
                Mode::Strict => {
                    self.error(path, msg);
                    PolygonResult::Failed
                }
                Mode::Lenient => {
                    self.warn(path, format!("{msg}; room skipped"));
                    PolygonResult::Degenerate
                }
            };
        }
        PolygonResult::Ok(polygon)
    }

    fn vertex(&mut self, v: &Value, path: &str) -> Option<Vertex> {
        let Some(obj) = v.as_object() else {
            self.error(path, "expected a vertex object");
            return None;
        };
        self.unknown_keys(obj, &["x", "y", "z"], path);
        let x = self
            .required(obj, "x", path)
            .and_then(|v| self.number(v, &format!("{path}.x")));
        let y = match (obj.get("y"), obj.get("z")) {
            (Some(y), z) => {
                if z.is_some() {
                    self.warn(path, "both \"y\" and \"z\" present; using \"y\"");
                }
                self.number(y, &format!("{path}.y"))
            }
            (None, Some(z)) => self.number(z, &format!("{path}.z")),
            (None, None) => {
                self.error(
                    &format!("{path}.y"),
                    "missing required field (\"y\" or \"z\")",
                );
                None
            }
        };
        Some(Vertex::new(x?, y?))
    }
}

enum RoomResult {
    Room(Room),
    Skipped,
    Failed,
}

enum PolygonResult {
    Ok(Polygon),
    Degenerate,
    Failed,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document() {
        let out = parse_strict(r#"{"room_count":0,"total_area":0,"room_types":[],"rooms":[]}"#);
        let fp = out.floorplan.unwrap();
        assert_eq!(fp, Floorplan::default());
        assert!(out.diagnostics.is_empty());
        assert!(!out.recovered);
    }

    #[test]
    fn malformed_json_reports_offset() {
        let doc = "{\"room_count\": 1,\n \"total_area\": }";
        let out = parse_strict(doc);
        assert!(out.floorplan.is_none());
        let msg = &out.diagnostics[0].message;
        let offset: usize = msg["malformed JSON at byte ".len()..]
            .split(':')
            .next()
            .unwrap()
            .parse()
            .unwrap();
        assert_eq!(doc.as_bytes()[offset], b'}');
    }

    #[test]
    fn missing_field_has_path() {
        let out = parse_strict(
            r#"{"room_count":1,"total_area":1,"room_types":["a"],"rooms":[{"area":1,"floor_polygon":[{"x":0,"y":0},{"x":0,"y":1},{"x":1,"y":1},{"x":1,"y":0}],"height":1,"width":1,"id":"r","room_type":"a"}]}"#,
        );
        assert!(out.floorplan.is_none());
        assert!(out
            .errors()
            .any(|d| d.path == "$.rooms[0].is_regular" && d.message.contains("missing")));
    }

    #[test]
    fn short_polygon_is_error() {
        let out = parse_strict(
            r#"{"room_count":1,"total_area":1,"room_types":["a"],"rooms":[{"area":1,"floor_polygon":[{"x":0,"y":0},{"x":0,"y":1}],"height":1,"width":1,"id":"r","room_type":"a","is_regular":0}]}"#,
        );
        assert!(out.floorplan.is_none());
        assert!(out.errors().any(|d| d.path == "$.rooms[0].floor_polygon"));
    }

    #[test]
    fn degenerate_polygon_strict_vs_lenient() {
        let doc = r#"{"room_count":1,"total_area":0,"room_types":["a"],"rooms":[{"area":0,"floor_polygon":[{"x":0,"y":0},{"x":1,"y":0},{"x":2,"y":0}],"height":0,"width":2,"id":"r","room_type":"a","is_regular":0}]}"#;
        assert!(parse_strict(doc).floorplan.is_none());
        let lenient = parse_lenient(doc);
        let fp = lenient.floorplan.unwrap();
        assert!(fp.rooms.is_empty());
        assert_eq!(fp.room_count, 1);
        assert!(lenient
            .diagnostics
            .iter()
            .any(|d| d.message.contains("skipped")));
    }

    #[test]
    fn unknown_fields_are_warnings() {
        let out = parse_strict(
            r#"{"room_count":0,"total_area":0,"room_types":[],"rooms":[],"doors":[]}"#,
        );
        assert!(out.floorplan.is_some());
        assert_eq!(out.diagnostics.len(), 1);
        assert_eq!(out.diagnostics[0].path, "$.doors");
    }

    #[test]
    fn lenient_without_object() {
        let out = parse_lenient("no json here");
        assert!(out.floorplan.is_none());
        assert!(out.diagnostics[0].message.contains("no balanced object"));
    }
}
