use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::geometry::{self, Polygon};
use crate::num::round1;

use super::{Floorplan, Room};

/// The geometric core of a room, before any stated numbers are attached.
#[derive(Debug, Clone, PartialEq)]
pub struct RoomGeometry {
    pub id: String,
    pub room_type: String,
    pub polygon: Polygon,
}

/// Builds a self-consistent floorplan from room geometry.
///
/// Polygons are simplified and put in canonical orientation. Areas and
/// bounding-box dimensions are rounded to one decimal; the total is the
/// rounded sum of the rounded room areas. Edges are left empty.
pub fn derive_fields(rooms: Vec<RoomGeometry>) -> Result<Floorplan> {
    let mut seen = HashSet::new();
    for r in &rooms {
        if !seen.insert(r.id.as_str()) {
            return Err(Error::DuplicateId(r.id.clone()));
        }
    }

    let mut out = Vec::with_capacity(rooms.len());
    for r in rooms {
        let polygon = geometry::canonicalize(&geometry::simplify_collinear(&r.polygon)?);
        let bb = geometry::bounding_box(&polygon);
        out.push(Room {
            area: round1(geometry::shoelace_area(&polygon)),
            height: round1(bb.height()),
            width: round1(bb.width()),
            is_regular: geometry::is_axis_rectangle(&polygon),
            floor_polygon: polygon,
            id: r.id,
            room_type: r.room_type,
        });
    }

    let total_area = round1(out.iter().map(|r| r.area).sum());
    Ok(Floorplan {
        room_count: out.len() as u64,
        total_area,
        room_types: out.iter().map(|r| r.room_type.clone()).collect(),
        rooms: out,
        edges: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(id: &str, ty: &str, c: &[(f64, f64)]) -> RoomGeometry {
        RoomGeometry {
            id: id.into(),
            room_type: ty.into(),
            polygon: Polygon::from_coords(c).unwrap(),
        }
    }

    #[test]
    fn bedroom_square() {
        let fp = derive_fields(vec![geom(
            "room|4",
            "Bedroom",
            &[(0.0, 0.0), (0.0, 6.4), (6.4, 6.4), (6.4, 0.0)],
        )])
        .unwrap();
        let r = &fp.rooms[0];
        assert_eq!(r.area, 41.0);
        assert_eq!(r.height, 6.4);
        assert_eq!(r.width, 6.4);
        assert!(r.is_regular);
        assert_eq!(fp.room_count, 1);
        assert_eq!(fp.total_area, 41.0);
        assert_eq!(fp.room_types, vec!["Bedroom".to_string()]);
    }

    #[test]
    fn unit_square() {
        let fp = derive_fields(vec![geom(
            "a",
            "Bath",
            &[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)],
        )])
        .unwrap();
        assert_eq!(fp.rooms[0].area, 1.0);
        assert!(fp.rooms[0].is_regular);
    }

    #[test]
    fn kitchen_l_polygon() {
        let fp = derive_fields(vec![geom(
            "room|8",
            "Kitchen",
            &[
                (12.8, 4.3),
                (12.8, 10.6),
                (17.1, 10.6),
                (17.1, 0.0),
                (14.9, 0.0),
                (14.9, 4.3),
            ],
        )])
        .unwrap();
        // cell decomposition 23.32 + 13.23 = 36.55
        assert_eq!(fp.rooms[0].area, 36.6);
        assert!(!fp.rooms[0].is_regular);
        assert_eq!(fp.rooms[0].height, 10.6);
        assert_eq!(fp.rooms[0].width, 4.3);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let sq = [(0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.0)];
        let err = derive_fields(vec![geom("a", "x", &sq), geom("a", "y", &sq)]).unwrap_err();
        assert!(matches!(err, Error::DuplicateId(id) if id == "a"));
    }

    #[test]
    fn idempotent() {
        let once = derive_fields(vec![
            geom(
                "a",
                "x",
                &[(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 1.0), (0.0, 1.0)],
            ),
            geom("b", "y", &[(2.0, 0.0), (3.3, 0.0), (3.3, 1.7), (2.0, 1.7)]),
        ])
        .unwrap();
        let twice = derive_fields(once.geometry()).unwrap();
        assert_eq!(once, twice);
        assert_eq!(once.rooms[0].floor_polygon.len(), 4);
    }
}
