//! Invariant checks on a parsed floorplan.
//!
//! Structural violations (duplicate ids, a wrong room count, self-crossing
//! polygons) are errors. Drift between stated numbers and the numbers the
//! polygons imply is reported as warnings.

use std::collections::{HashMap, HashSet};

use crate::geometry;
use crate::model::{Diagnostic, Floorplan};
use crate::num::{format_number, round1};

fn drift(stated: f64, derived: f64) -> bool {
    (stated - derived).abs() > 1e-9
}

pub fn validate(fp: &Floorplan) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    let mut seen = HashSet::new();
    for (i, r) in fp.rooms.iter().enumerate() {
        if !seen.insert(r.id.as_str()) {
            out.push(Diagnostic::error(
                format!("$.rooms[{i}].id"),
                format!("duplicate room id {:?}", r.id),
            ));
        }
    }

    if fp.room_count != fp.rooms.len() as u64 {
        out.push(Diagnostic::error(
            "$.room_count",
            format!(
                "room_count is {} but {} rooms are listed",
                fp.room_count,
                fp.rooms.len()
            ),
        ));
    }

    let mut listed: HashMap<&str, i64> = HashMap::new();
    for t in &fp.room_types {
        *listed.entry(t).or_default() += 1;
    }
    for r in &fp.rooms {
        *listed.entry(&r.room_type).or_default() -= 1;
    }
    if listed.values().any(|&n| n != 0) {
        out.push(Diagnostic::warning(
            "$.room_types",
            "room_types does not match the types of the listed rooms",
        ));
    }

    for (i, r) in fp.rooms.iter().enumerate() {
        let path = format!("$.rooms[{i}]");
        let p = &r.floor_polygon;
        if !geometry::is_simple(p) {
            out.push(Diagnostic::error(
                format!("{path}.floor_polygon"),
                "polygon boundary crosses itself",
            ));
            continue;
        }
        let area = round1(geometry::shoelace_area(p));
        if drift(r.area, area) {
            out.push(Diagnostic::warning(
                format!("{path}.area"),
                format!(
                    "stated {} but polygon gives {}",
                    format_number(r.area),
                    format_number(area)
                ),
            ));
        }
        let bb = geometry::bounding_box(p);
        for (field, stated, derived) in [
            ("height", r.height, round1(bb.height())),
            ("width", r.width, round1(bb.width())),
        ] {
            if drift(stated, derived) {
                out.push(Diagnostic::warning(
                    format!("{path}.{field}"),
                    format!(
                        "stated {} but bounding box gives {}",
                        format_number(stated),
                        format_number(derived)
                    ),
                ));
            }
        }
        let regular = geometry::simplify_collinear(p)
            .map(|s| geometry::is_axis_rectangle(&s))
            .unwrap_or(false);
        if r.is_regular != regular {
            out.push(Diagnostic::warning(
                format!("{path}.is_regular"),
                format!("stated {} but polygon gives {}", r.is_regular, regular),
            ));
        }
        if !geometry::is_rectilinear(p) {
            out.push(Diagnostic::warning(
                format!("{path}.floor_polygon"),
                "polygon is not rectilinear; overlap checks skip it",
            ));
        }
    }

    let stated_sum = round1(fp.rooms.iter().map(|r| r.area).sum());
    if drift(fp.total_area, stated_sum) {
        out.push(Diagnostic::warning(
            "$.total_area",
            format!(
                "stated {} but room areas sum to {}",
                format_number(fp.total_area),
                format_number(stated_sum)
            ),
        ));
    }

    let rect: Vec<usize> = (0..fp.rooms.len())
        .filter(|&i| geometry::is_rectilinear(&fp.rooms[i].floor_polygon))
        .collect();
    for (k, &i) in rect.iter().enumerate() {
        for &j in &rect[k + 1..] {
            let (a, b) = (&fp.rooms[i], &fp.rooms[j]);
            if geometry::polygons_overlap(&a.floor_polygon, &b.floor_polygon).unwrap_or(false) {
                out.push(Diagnostic::warning(
                    format!("$.rooms[{j}].floor_polygon"),
                    format!("overlaps room {:?}", a.id),
                ));
            }
        }
    }
    out
}
