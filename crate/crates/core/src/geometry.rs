//! Polygon primitives for axis-aligned room layouts.
//!
//! Coordinates follow the image convention used by both source datasets:
//! `x` grows to the right and `y` grows downwards.

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

/// Collinearity and length tolerance.
pub const EPS: f64 = 1e-9;

/// Area below which an intersection is not counted as overlap.
pub const OVERLAP_AREA_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub x: f64,
    pub y: f64,
}

impl Vertex {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    fn lex_cmp(&self, other: &Vertex) -> std::cmp::Ordering {
        self.x
            .total_cmp(&other.x)
            .then_with(|| self.y.total_cmp(&other.y))
    }
}

impl From<(f64, f64)> for Vertex {
    fn from((x, y): (f64, f64)) -> Self {
        Self { x, y }
    }
}

/// An implicitly closed vertex ring with at least three finite vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    ring: Vec<Vertex>,
}

impl Polygon {
    pub fn new(ring: Vec<Vertex>) -> Result<Self, GeometryError> {
        if ring.len() < 3 {
            return Err(GeometryError::TooFewVertices(ring.len()));
        }
        if ring.iter().any(|v| !v.x.is_finite() || !v.y.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        Ok(Self { ring })
    }

    pub fn from_coords(coords: &[(f64, f64)]) -> Result<Self, GeometryError> {
        Self::new(coords.iter().copied().map(Vertex::from).collect())
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.ring
    }

    pub fn len(&self) -> usize {
        self.ring.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ring.is_empty()
    }

    /// Iterates over the closed ring's edges as `(start, end)` pairs.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        let n = self.ring.len();
        (0..n).map(move |i| (self.ring[i], self.ring[(i + 1) % n]))
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Polygon {
        Polygon {
            ring: self
                .ring
                .iter()
                .map(|v| Vertex::new(v.x + dx, v.y + dy))
                .collect(),
        }
    }

    pub fn reversed(&self) -> Polygon {
        let mut ring = self.ring.clone();
        ring.reverse();
        Polygon { ring }
    }

    pub fn rotated(&self, k: usize) -> Polygon {
        let mut ring = self.ring.clone();
        let n = ring.len();
        ring.rotate_left(k % n);
        Polygon { ring }
    }

    pub fn into_vertices(self) -> Vec<Vertex> {
        self.ring
    }
}

/// Axis-aligned rectangle with `x0 < x1` and `y0 < y1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Option<Rect> {
        (x0 < x1 && y0 < y1).then_some(Rect { x0, y0, x1, y1 })
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// Area of the intersection with `other`, zero when disjoint or touching.
    pub fn intersection_area(&self, other: &Rect) -> f64 {
        let w = self.x1.min(other.x1) - self.x0.max(other.x0);
        let h = self.y1.min(other.y1) - self.y0.max(other.y0);
        if w <= 0.0 || h <= 0.0 {
            0.0
        } else {
            w * h
        }
    }
}

/// Signed shoelace area. Negative for rings that run
/// counterclockwise on screen (y pointing down).
pub fn signed_area(p: &Polygon) -> f64 {
    p.edges().map(|(a, b)| a.x * b.y - b.x * a.y).sum::<f64>() / 2.0
}

pub fn shoelace_area(p: &Polygon) -> f64 {
    signed_area(p).abs()
}

/// Tight axis-aligned box. The result may have zero width or height for
/// degenerate input, so it is returned unvalidated.
pub fn bounding_box(p: &Polygon) -> Rect {
    let mut r = Rect {
        x0: f64::INFINITY,
        y0: f64::INFINITY,
        x1: f64::NEG_INFINITY,
        y1: f64::NEG_INFINITY,
    };
    for v in p.vertices() {
        r.x0 = r.x0.min(v.x);
        r.y0 = r.y0.min(v.y);
        r.x1 = r.x1.max(v.x);
        r.y1 = r.y1.max(v.y);
    }
    r
}

fn cross(o: Vertex, a: Vertex, b: Vertex) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

fn same_point(a: Vertex, b: Vertex) -> bool {
    (a.x - b.x).abs() <= EPS && (a.y - b.y).abs() <= EPS
}

/// Drops repeated vertices and every vertex collinear with its neighbours.
pub fn simplify_collinear(p: &Polygon) -> Result<Polygon, GeometryError> {
    let mut ring: Vec<Vertex> = p.vertices().to_vec();
    loop {
        let n = ring.len();
        if n < 3 {
            return Err(GeometryError::Degenerate);
        }
        let mut removed = None;
        for i in 0..n {
            let prev = ring[(i + n - 1) % n];
            let cur = ring[i];
            let next = ring[(i + 1) % n];
            let scale = 1.0_f64
                .max((prev.x - next.x).abs() + (prev.y - next.y).abs())
                .max((prev.x - cur.x).abs() + (prev.y - cur.y).abs());
            if same_point(prev, cur) || cross(prev, cur, next).abs() <= EPS * scale {
                removed = Some(i);
                break;
            }
        }
        match removed {
            Some(i) => {
                ring.remove(i);
            }
            None => break,
        }
    }
    let out = Polygon { ring };
    if shoelace_area(&out) <= EPS {
        return Err(GeometryError::Degenerate);
    }
    Ok(out)
}

/// Orients the ring counterclockwise on screen (negative signed area) and
/// rotates it so the lexicographically smallest vertex comes first.
pub fn canonicalize(p: &Polygon) -> Polygon {
    let mut out = if signed_area(p) > 0.0 {
        p.reversed()
    } else {
        p.clone()
    };
    let start = out
        .ring
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.lex_cmp(b))
        .map(|(i, _)| i)
        .unwrap_or(0);
    out.ring.rotate_left(start);
    out
}

pub fn is_rectilinear(p: &Polygon) -> bool {
    check_rectilinear(p).is_ok()
}

fn check_rectilinear(p: &Polygon) -> Result<(), GeometryError> {
    for (index, (a, b)) in p.edges().enumerate() {
        if (a.x - b.x).abs() > EPS && (a.y - b.y).abs() > EPS {
            return Err(GeometryError::NotRectilinear { index });
        }
    }
    Ok(())
}

/// True when the polygon has exactly four vertices that are the corners of
/// its own bounding box.
pub fn is_axis_rectangle(p: &Polygon) -> bool {
    if p.len() != 4 {
        return false;
    }
    let bb = bounding_box(p);
    if bb.width() <= EPS || bb.height() <= EPS {
        return false;
    }
    let corners = [
        Vertex::new(bb.x0, bb.y0),
        Vertex::new(bb.x0, bb.y1),
        Vertex::new(bb.x1, bb.y1),
        Vertex::new(bb.x1, bb.y0),
    ];
    corners
        .iter()
        .all(|c| p.vertices().iter().any(|v| same_point(*v, *c)))
        && is_rectilinear(p)
}

/// Splits a rectilinear polygon into disjoint rectangles using vertical
/// slabs, merging neighbouring slabs that share the same y-intervals.
pub fn rect_decompose(p: &Polygon) -> Result<Vec<Rect>, GeometryError> {
    check_rectilinear(p)?;
    let mut xs: Vec<f64> = p.vertices().iter().map(|v| v.x).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() <= EPS);

    // horizontal edges as (y, xmin, xmax)
    let horizontals: Vec<(f64, f64, f64)> = p
        .edges()
        .filter(|(a, b)| (a.y - b.y).abs() <= EPS && (a.x - b.x).abs() > EPS)
        .map(|(a, b)| (a.y, a.x.min(b.x), a.x.max(b.x)))
        .collect();

    // (x0, x1, covered y intervals) per vertical slab.
    type Slab = (f64, f64, Vec<(f64, f64)>);
    let mut slabs: Vec<Slab> = Vec::new();
    for w in xs.windows(2) {
        let (xa, xb) = (w[0], w[1]);
        let mid = 0.5 * (xa + xb);
        let mut ys: Vec<f64> = horizontals
            .iter()
            .filter(|(_, lo, hi)| *lo < mid && mid < *hi)
            .map(|(y, _, _)| *y)
            .collect();
        ys.sort_by(f64::total_cmp);
        let intervals: Vec<(f64, f64)> = ys
            .chunks_exact(2)
            .map(|c| (c[0], c[1]))
            .filter(|(lo, hi)| hi - lo > EPS)
            .collect();
        match slabs.last_mut() {
            Some((_, end, prev)) if *prev == intervals && (*end - xa).abs() <= EPS => {
                *end = xb;
            }
            _ => slabs.push((xa, xb, intervals)),
        }
    }

    let mut rects = Vec::new();
    for (x0, x1, intervals) in slabs {
        for (y0, y1) in intervals {
            if let Some(r) = Rect::new(x0, y0, x1, y1) {
                rects.push(r);
            }
        }
    }
    Ok(rects)
}

/// True iff the interiors intersect with positive area. Shared edges and
/// corners do not count.
pub fn polygons_overlap(a: &Polygon, b: &Polygon) -> Result<bool, GeometryError> {
    let ra = rect_decompose(a)?;
    let rb = rect_decompose(b)?;
    let bba = bounding_box(a);
    let bbb = bounding_box(b);
    if bba.x1 <= bbb.x0 || bbb.x1 <= bba.x0 || bba.y1 <= bbb.y0 || bbb.y1 <= bba.y0 {
        return Ok(false);
    }
    let total: f64 = ra
        .iter()
        .flat_map(|x| rb.iter().map(move |y| x.intersection_area(y)))
        .sum();
    Ok(total > OVERLAP_AREA_EPS)
}

fn interval_gap(a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
    let (a0, a1) = (a0.min(a1), a0.max(a1));
    let (b0, b1) = (b0.min(b1), b0.max(b1));
    (b0 - a1).max(a0 - b1).max(0.0)
}

fn is_axis_aligned(a: Vertex, b: Vertex) -> bool {
    (a.x - b.x).abs() <= EPS || (a.y - b.y).abs() <= EPS
}

/// Minimum Manhattan distance between two segments.
pub fn segment_manhattan_distance(a: (Vertex, Vertex), b: (Vertex, Vertex)) -> f64 {
    if is_axis_aligned(a.0, a.1) && is_axis_aligned(b.0, b.1) {
        return interval_gap(a.0.x, a.1.x, b.0.x, b.1.x) + interval_gap(a.0.y, a.1.y, b.0.y, b.1.y);
    }
    // |dx| + |dy| with (dx, dy) affine in (s, t) over the unit square is
    // convex and piecewise linear; its minimum sits at a corner of the square
    // or where dx = 0 / dy = 0 cross the square boundary or each other.
    let (p0, p1) = a;
    let (q0, q1) = b;
    let u = (p1.x - p0.x, p1.y - p0.y);
    let v = (q1.x - q0.x, q1.y - q0.y);
    let w = (p0.x - q0.x, p0.y - q0.y);
    let f = |s: f64, t: f64| {
        let dx = w.0 + s * u.0 - t * v.0;
        let dy = w.1 + s * u.1 - t * v.1;
        dx.abs() + dy.abs()
    };
    let mut candidates: Vec<(f64, f64)> = vec![(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)];
    // line: c0 + s*cs - t*ct = 0, intersected with the four square edges
    for (c0, cs, ct) in [(w.0, u.0, v.0), (w.1, u.1, v.1)] {
        for fixed in [0.0, 1.0] {
            if cs.abs() > EPS {
                candidates.push(((fixed * ct - c0) / cs, fixed));
            }
            if ct.abs() > EPS {
                candidates.push((fixed, (c0 + fixed * cs) / ct));
            }
        }
    }
    let det = -u.0 * v.1 + u.1 * v.0;
    if det.abs() > EPS {
        let s = (w.0 * v.1 - w.1 * v.0) / det;
        let t = (u.1 * w.0 - u.0 * w.1) / det;
        candidates.push((s, t));
    }
    candidates
        .into_iter()
        .filter(|(s, t)| (-EPS..=1.0 + EPS).contains(s) && (-EPS..=1.0 + EPS).contains(t))
        .map(|(s, t)| f(s.clamp(0.0, 1.0), t.clamp(0.0, 1.0)))
        .fold(f64::INFINITY, f64::min)
}

/// Minimum Manhattan distance between the two boundaries.
pub fn boundary_manhattan_distance(a: &Polygon, b: &Polygon) -> f64 {
    a.edges()
        .flat_map(|ea| b.edges().map(move |eb| segment_manhattan_distance(ea, eb)))
        .fold(f64::INFINITY, f64::min)
}

/// Area centroid; falls back to the vertex mean for zero-area rings.
pub fn centroid(p: &Polygon) -> Vertex {
    let a = signed_area(p);
    if a.abs() <= EPS {
        let n = p.len() as f64;
        let (sx, sy) = p
            .vertices()
            .iter()
            .fold((0.0, 0.0), |(sx, sy), v| (sx + v.x, sy + v.y));
        return Vertex::new(sx / n, sy / n);
    }
    let (mut cx, mut cy) = (0.0, 0.0);
    for (p0, p1) in p.edges() {
        let c = p0.x * p1.y - p1.x * p0.y;
        cx += (p0.x + p1.x) * c;
        cy += (p0.y + p1.y) * c;
    }
    Vertex::new(cx / (6.0 * a), cy / (6.0 * a))
}

fn segments_intersect(a: (Vertex, Vertex), b: (Vertex, Vertex)) -> bool {
    let d1 = cross(b.0, b.1, a.0);
    let d2 = cross(b.0, b.1, a.1);
    let d3 = cross(a.0, a.1, b.0);
    let d4 = cross(a.0, a.1, b.1);
    if ((d1 > EPS && d2 < -EPS) || (d1 < -EPS && d2 > EPS))
        && ((d3 > EPS && d4 < -EPS) || (d3 < -EPS && d4 > EPS))
    {
        return true;
    }
    let on = |p: Vertex, q: Vertex, r: Vertex| {
        cross(p, q, r).abs() <= EPS
            && r.x >= p.x.min(q.x) - EPS
            && r.x <= p.x.max(q.x) + EPS
            && r.y >= p.y.min(q.y) - EPS
            && r.y <= p.y.max(q.y) + EPS
    };
    on(b.0, b.1, a.0) || on(b.0, b.1, a.1) || on(a.0, a.1, b.0) || on(a.0, a.1, b.1)
}

/// Checks that no two non-adjacent edges touch.
pub fn is_simple(p: &Polygon) -> bool {
    let edges: Vec<_> = p.edges().collect();
    let n = edges.len();
    for i in 0..n {
        for j in (i + 1)..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            if segments_intersect(edges[i], edges[j]) {
                return false;
            }
        }
    }
    true
}
