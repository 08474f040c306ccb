//! SVG figures of floorplans.

use std::fmt::Write;

use crate::bubble::BubbleDiagram;
use crate::geometry::{self, Vertex};
use crate::model::Floorplan;

const CANVAS: f64 = 512.0;
const MARGIN: f64 = 16.0;

const PALETTE: [&str; 12] = [
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5",
    "#d9d9d9", "#bc80bd", "#ccebc5", "#ffed6f",
];

/// Fill colour for a room type. Fixed for common types, otherwise picked
/// from the palette by a hash of the name, so it never depends on which
/// other types a plan contains.
pub fn type_color(room_type: &str) -> &'static str {
    let fixed = match room_type {
        "LivingRoom" => Some(0),
        "MasterRoom" => Some(1),
        "Kitchen" => Some(2),
        "Bathroom" => Some(3),
        "DiningRoom" => Some(4),
        "ChildRoom" => Some(5),
        "StudyRoom" => Some(6),
        "SecondRoom" => Some(7),
        "GuestRoom" => Some(8),
        "Balcony" => Some(9),
        "Entrance" => Some(10),
        "Storage" => Some(11),
        "Bedroom" => Some(7),
        _ => None,
    };
    let i = fixed.unwrap_or_else(|| {
        // FNV-1a
        let h = room_type.bytes().fold(0xcbf29ce484222325u64, |h, b| {
            (h ^ b as u64).wrapping_mul(0x100000001b3)
        });
        (h % PALETTE.len() as u64) as usize
    });
    PALETTE[i]
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

struct Frame {
    x0: f64,
    y0: f64,
    scale: f64,
}

impl Frame {
    fn of(fp: &Floorplan) -> Option<Frame> {
        let vs = fp.rooms.iter().flat_map(|r| r.floor_polygon.vertices());
        let (mut x0, mut y0, mut x1, mut y1) = (
            f64::INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::NEG_INFINITY,
        );
        for v in vs {
            x0 = x0.min(v.x);
            y0 = y0.min(v.y);
            x1 = x1.max(v.x);
            y1 = y1.max(v.y);
        }
        if !x0.is_finite() {
            return None;
        }
        let span = (x1 - x0).max(y1 - y0).max(1e-9);
        Some(Frame {
            x0,
            y0,
            scale: (CANVAS - 2.0 * MARGIN) / span,
        })
    }

    fn map(&self, v: Vertex) -> (f64, f64) {
        (
            MARGIN + (v.x - self.x0) * self.scale,
            MARGIN + (v.y - self.y0) * self.scale,
        )
    }
}

/// Renders filled room polygons with id labels. With `overlay`, diagram
/// nodes are drawn at room centroids and edges as lines between them.
pub fn render_svg(fp: &Floorplan, overlay: Option<&BubbleDiagram>) -> String {
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{c}" height="{c}" viewBox="0 0 {c} {c}">"#,
        c = CANVAS
    )
    .unwrap();
    let Some(frame) = Frame::of(fp) else {
        s.push_str("</svg>\n");
        return s;
    };

    s.push_str("<g class=\"rooms\">\n");
    for r in &fp.rooms {
        let pts: Vec<String> = r
            .floor_polygon
            .vertices()
            .iter()
            .map(|&v| {
                let (x, y) = frame.map(v);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        writeln!(
            s,
            r##"<polygon points="{}" fill="{}" stroke="#333333" stroke-width="1.50" data-id="{}" data-type="{}"/>"##,
            pts.join(" "),
            type_color(&r.room_type),
            escape(&r.id),
            escape(&r.room_type)
        )
        .unwrap();
    }
    s.push_str("</g>\n<g class=\"labels\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">\n");
    for r in &fp.rooms {
        let (x, y) = frame.map(geometry::centroid(&r.floor_polygon));
        writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}">{}</text>"#,
            y - 6.0,
            escape(&r.id)
        )
        .unwrap();
    }
    s.push_str("</g>\n");

    if let Some(bd) = overlay {
        let centre = |id: &str| {
            fp.room(id)
                .map(|r| frame.map(geometry::centroid(&r.floor_polygon)))
        };
        s.push_str("<g class=\"bubble\" stroke=\"#c0392b\" stroke-width=\"2.00\">\n");
        for (a, b) in bd.edge_list() {
            if let (Some((x1, y1)), Some((x2, y2))) = (centre(&a), centre(&b)) {
                writeln!(
                    s,
                    r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}"/>"#
                )
                .unwrap();
            }
        }
        for n in &bd.nodes {
            if let Some((x, y)) = centre(&n.id) {
                writeln!(
                    s,
                    r##"<circle cx="{x:.2}" cy="{y:.2}" r="4.00" fill="#c0392b"/>"##
                )
                .unwrap();
            }
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bubble::extract_bubble;
    use crate::model::{derive_fields, RoomGeometry};
    use crate::Polygon;

    fn two_rooms() -> Floorplan {
        let g = |id: &str, t: &str, c: &[(f64, f64)]| RoomGeometry {
            id: id.into(),
            room_type: t.into(),
            polygon: Polygon::from_coords(c).unwrap(),
        };
        derive_fields(vec![
            g(
                "a",
                "Kitchen",
                &[(0.0, 0.0), (0.0, 2.0), (3.0, 2.0), (3.0, 0.0)],
            ),
            g(
                "b",
                "Ba<th>",
                &[(3.0, 0.0), (3.0, 2.0), (4.5, 2.0), (4.5, 0.0)],
            ),
        ])
        .unwrap()
    }

    #[test]
    fn empty_plan_is_valid_canvas() {
        let svg = render_svg(&Floorplan::default(), None);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(!svg.contains("<polygon"));
    }

    #[test]
    fn polygons_and_overlay() {
        let fp = two_rooms();
        let bd = extract_bubble(&fp, 2.0);
        let svg = render_svg(&fp, Some(&bd));
        assert_eq!(svg.matches("<polygon").count(), 2);
        assert_eq!(svg.matches("<line").count(), 1);
        assert!(svg.contains("Ba&lt;th&gt;"));
        assert_eq!(svg, render_svg(&fp, Some(&bd)));
    }

    #[test]
    fn colors_are_stable() {
        assert_eq!(type_color("Kitchen"), type_color("Kitchen"));
        assert_eq!(type_color("Foyer"), type_color("Foyer"));
    }
}
