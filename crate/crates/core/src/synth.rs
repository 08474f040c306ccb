//! Random test data: rectilinear polygons, room layouts, rasters and
//! ground-truth plans.
//!
//! Layouts live on an integer cell grid. Rooms are unions of one or two
//! rectangles from a guillotine partition, so they are simply connected and
//! free of diagonal pinches.

use std::collections::{HashMap, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::bubble;
use crate::error::Result;
use crate::geometry::{Polygon, Vertex};
use crate::model::{derive_fields, Floorplan, RoomGeometry};
use crate::raster::{trace_perimeter, CategoryMap, RasterPlan, RoomMask};

/// Room types used for synthetic plans when no category map is involved.
pub const ROOM_TYPES: [&str; 8] = [
    "LivingRoom",
    "MasterRoom",
    "Kitchen",
    "Bathroom",
    "DiningRoom",
    "ChildRoom",
    "StudyRoom",
    "Balcony",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthRoom {
    pub room_type: String,
    /// `(row, col)` cells.
    pub cells: Vec<(u32, u32)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthLayout {
    pub width: u32,
    pub height: u32,
    pub rooms: Vec<SynthRoom>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Cells {
    r0: u32,
    c0: u32,
    r1: u32,
    c1: u32,
}

impl Cells {
    fn shares_edge(&self, o: &Cells) -> bool {
        let rows = self.r0.max(o.r0) < self.r1.min(o.r1);
        let cols = self.c0.max(o.c0) < self.c1.min(o.c1);
        (rows && (self.c1 == o.c0 || o.c1 == self.c0))
            || (cols && (self.r1 == o.r0 || o.r1 == self.r0))
    }
}

/// Guillotine partition of a random sub-rectangle of a `width x height`
/// grid into up to `max_rooms` rooms. Some neighbouring pairs merge into
/// L- or T-shaped rooms and some rooms are left empty to create gaps.
pub fn random_layout<R: Rng>(
    rng: &mut R,
    width: u32,
    height: u32,
    max_rooms: usize,
    types: &[&str],
) -> SynthLayout {
    const MIN_SIDE: u32 = 3;
    let c0 = rng.gen_range(0..=width / 4);
    let r0 = rng.gen_range(0..=height / 4);
    let c1 = rng.gen_range((width * 3 / 4).max(c0 + MIN_SIDE)..=width);
    let r1 = rng.gen_range((height * 3 / 4).max(r0 + MIN_SIDE)..=height);
    let mut rects = vec![Cells { r0, c0, r1, c1 }];

    let target = rng.gen_range(1..=max_rooms.max(1) + 1);
    while rects.len() < target {
        let splittable: Vec<usize> = (0..rects.len())
            .filter(|&i| {
                let r = rects[i];
                r.r1 - r.r0 >= 2 * MIN_SIDE || r.c1 - r.c0 >= 2 * MIN_SIDE
            })
            .collect();
        let Some(&i) = splittable.choose(rng) else {
            break;
        };
        let r = rects[i];
        let can_rows = r.r1 - r.r0 >= 2 * MIN_SIDE;
        let can_cols = r.c1 - r.c0 >= 2 * MIN_SIDE;
        let split_rows = if can_rows && can_cols {
            rng.gen_bool(0.5)
        } else {
            can_rows
        };
        let (a, b) = if split_rows {
            let at = rng.gen_range(r.r0 + MIN_SIDE..=r.r1 - MIN_SIDE);
            (Cells { r1: at, ..r }, Cells { r0: at, ..r })
        } else {
            let at = rng.gen_range(r.c0 + MIN_SIDE..=r.c1 - MIN_SIDE);
            (Cells { c1: at, ..r }, Cells { c0: at, ..r })
        };
        rects[i] = a;
        rects.push(b);
    }

    let mut groups: Vec<Vec<Cells>> = Vec::new();
    let mut taken = vec![false; rects.len()];
    for i in 0..rects.len() {
        if taken[i] {
            continue;
        }
        taken[i] = true;
        let mut group = vec![rects[i]];
        if rng.gen_bool(0.3) {
            if let Some(j) =
                (0..rects.len()).find(|&j| !taken[j] && rects[i].shares_edge(&rects[j]))
            {
                taken[j] = true;
                group.push(rects[j]);
            }
        }
        groups.push(group);
    }
    if groups.len() > max_rooms {
        groups.truncate(max_rooms);
    }
    if groups.len() > 1 {
        let keep_one = rng.gen_range(0..groups.len());
        let mut i = 0;
        groups.retain(|_| {
            let keep = i == keep_one || !rng.gen_bool(0.15);
            i += 1;
            keep
        });
    }

    let rooms = groups
        .into_iter()
        .map(|g| {
            let mut cells: Vec<(u32, u32)> = g
                .iter()
                .flat_map(|c| (c.r0..c.r1).flat_map(move |r| (c.c0..c.c1).map(move |col| (r, col))))
                .collect();
            cells.sort_unstable();
            SynthRoom {
                room_type: types.choose(rng).expect("non-empty type list").to_string(),
                cells,
            }
        })
        .collect();
    SynthLayout {
        width,
        height,
        rooms,
    }
}

fn mask_of(room: &SynthRoom) -> RoomMask {
    RoomMask {
        category: 0,
        instance: 0,
        pixels: room.cells.clone(),
    }
}

/// Paints a layout with the first channel-3 value of each room's type and
/// a per-type instance number.
pub fn layout_to_raster(layout: &SynthLayout, cmap: &CategoryMap) -> Result<RasterPlan> {
    let background = cmap.non_room.iter().next().copied().unwrap_or(0);
    let mut raster = RasterPlan::filled(layout.width, layout.height, background);
    let mut per_type: HashMap<&str, u8> = HashMap::new();
    for room in &layout.rooms {
        let value = cmap.value_of(&room.room_type).ok_or_else(|| {
            crate::Error::CategoryMap(format!("no value for room type {:?}", room.room_type))
        })?;
        let n = per_type.entry(&room.room_type).or_insert(0);
        *n = n.wrapping_add(1);
        for &(r, c) in &room.cells {
            raster.set(1, r, c, 255);
            raster.set(2, r, c, value);
            raster.set(3, r, c, *n);
        }
    }
    Ok(raster)
}

/// A random conforming raster whose room types are drawn from `cmap`.
pub fn random_raster<R: Rng>(
    rng: &mut R,
    cmap: &CategoryMap,
    size: u32,
    max_rooms: usize,
) -> Result<RasterPlan> {
    let types: Vec<&str> = cmap.values.values().map(String::as_str).collect();
    let layout = random_layout(rng, size, size, max_rooms, &types);
    layout_to_raster(&layout, cmap)
}

/// Traces a layout into a self-consistent plan with ids `room|k`. Edges
/// are extracted at `threshold`.
pub fn layout_to_floorplan(layout: &SynthLayout, threshold: f64) -> Result<Floorplan> {
    let mut rooms = Vec::with_capacity(layout.rooms.len());
    for (k, room) in layout.rooms.iter().enumerate() {
        rooms.push(RoomGeometry {
            id: format!("room|{k}"),
            room_type: room.room_type.clone(),
            polygon: trace_perimeter(&mask_of(room))?,
        });
    }
    let mut fp = derive_fields(rooms)?;
    fp.edges = bubble::extract_bubble(&fp, threshold).edge_list();
    Ok(fp)
}

/// A ground-truth plan on an integer grid, so every derived number is
/// exact.
pub fn random_floorplan<R: Rng>(rng: &mut R, max_rooms: usize, threshold: f64) -> Floorplan {
    let layout = random_layout(rng, 24, 20, max_rooms, &ROOM_TYPES);
    layout_to_floorplan(&layout, threshold).expect("synthetic layouts trace cleanly")
}

fn fill_holes(grid: &mut [bool], n: usize) {
    let mut outside = vec![false; n * n];
    let mut queue = VecDeque::new();
    for i in 0..n {
        for (r, c) in [(0, i), (n - 1, i), (i, 0), (i, n - 1)] {
            if !grid[r * n + c] && !outside[r * n + c] {
                outside[r * n + c] = true;
                queue.push_back((r, c));
            }
        }
    }
    while let Some((r, c)) = queue.pop_front() {
        let nb = [
            (r.wrapping_sub(1), c),
            (r + 1, c),
            (r, c.wrapping_sub(1)),
            (r, c + 1),
        ];
        for (nr, nc) in nb {
            if nr < n && nc < n && !grid[nr * n + nc] && !outside[nr * n + nc] {
                outside[nr * n + nc] = true;
                queue.push_back((nr, nc));
            }
        }
    }
    for i in 0..n * n {
        if !outside[i] {
            grid[i] = true;
        }
    }
}

fn fix_pinches(grid: &mut [bool], n: usize) -> bool {
    let mut changed = false;
    for r in 0..n - 1 {
        for c in 0..n - 1 {
            let [a, b, cc, d] = [
                r * n + c,
                r * n + c + 1,
                (r + 1) * n + c,
                (r + 1) * n + c + 1,
            ];
            if grid[a] && grid[d] && !grid[b] && !grid[cc] {
                grid[b] = true;
                changed = true;
            } else if grid[b] && grid[cc] && !grid[a] && !grid[d] {
                grid[a] = true;
                changed = true;
            }
        }
    }
    changed
}

/// A random simply connected rectilinear polygon on a 0.1 grid together
/// with its cell count. The polygon spans at most `max_cells` cells per
/// side and is offset by up to 10 length units.
pub fn random_rectilinear_polygon<R: Rng>(rng: &mut R, max_cells: usize) -> (Polygon, usize) {
    let n = max_cells.max(2) + 2;
    let mut grid = vec![false; n * n];
    let start = (rng.gen_range(1..n - 1), rng.gen_range(1..n - 1));
    grid[start.0 * n + start.1] = true;
    let mut cells = vec![start];
    let target = rng.gen_range(1..=(max_cells * max_cells).div_ceil(2).max(1));
    let mut attempts = 0;
    while cells.len() < target && attempts < target * 20 {
        attempts += 1;
        let &(r, c) = cells.choose(rng).expect("non-empty");
        let (dr, dc) = [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)][rng.gen_range(0..4)];
        let (nr, nc) = (r as i64 + dr, c as i64 + dc);
        // keep a one-cell empty border so hole filling sees the outside
        if nr < 1 || nc < 1 || nr >= n as i64 - 1 || nc >= n as i64 - 1 {
            continue;
        }
        let (nr, nc) = (nr as usize, nc as usize);
        if !grid[nr * n + nc] {
            grid[nr * n + nc] = true;
            cells.push((nr, nc));
        }
    }
    loop {
        fill_holes(&mut grid, n);
        if !fix_pinches(&mut grid, n) {
            break;
        }
    }
    let pixels: Vec<(u32, u32)> = (0..n * n)
        .filter(|&i| grid[i])
        .map(|i| ((i / n) as u32, (i % n) as u32))
        .collect();
    let count = pixels.len();
    let traced = trace_perimeter(&RoomMask {
        category: 0,
        instance: 0,
        pixels,
    })
    .expect("hole- and pinch-free blobs trace cleanly");
    let (ox, oy) = (rng.gen_range(0..100) as f64, rng.gen_range(0..100) as f64);
    let ring = traced
        .vertices()
        .iter()
        .map(|v| Vertex::new((v.x + ox) / 10.0, (v.y + oy) / 10.0))
        .collect();
    (Polygon::new(ring).expect("traced ring is valid"), count)
}
