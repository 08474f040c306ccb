//! Conversion of 4-channel room rasters into floorplans.
//!
//! Pixel `(row, col)` is the unit cell `[col, col+1] x [row, row+1]`, so a
//! traced room polygon has exactly the room's pixel count as area.
//!
//! Channel 3 holds a room-category value per pixel and channel 4 separates
//! rooms that share a category. Channels 1 and 2 are carried along but room
//! membership is decided by channel 3 and the category map alone.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bubble;
use crate::error::{Error, Result};
use crate::geometry::{self, Polygon, Vertex};
use crate::model::{derive_fields, Floorplan, RoomGeometry};

/// Side length of conforming rasters.
pub const CONFORMING_SIZE: u32 = 256;

/// Default adjacency threshold for raster sources, in pixels.
pub const RASTER_ADJACENCY_THRESHOLD: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterPlan {
    width: u32,
    height: u32,
    /// Interleaved ch1..ch4, row-major.
    data: Vec<u8>,
}

impl RasterPlan {
    pub fn from_rgba(width: u32, height: u32, data: Vec<u8>) -> Result<Self> {
        let expected = width as usize * height as usize * 4;
        if data.len() != expected {
            return Err(Error::Raster(format!(
                "expected {expected} bytes for {width}x{height}x4, got {}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// A blank raster where every pixel carries `background` in channel 3.
    pub fn filled(width: u32, height: u32, background: u8) -> Self {
        let mut data = vec![0u8; width as usize * height as usize * 4];
        for px in data.chunks_exact_mut(4) {
            px[2] = background;
        }
        Self {
            width,
            height,
            data,
        }
    }

    /// Raw container: 256x256 pixels, row-major, 4 bytes per pixel.
    pub fn from_raw_bytes(bytes: &[u8]) -> Result<Self> {
        Self::from_rgba(CONFORMING_SIZE, CONFORMING_SIZE, bytes.to_vec())
    }

    /// PNG container with RGBA = ch1..ch4. Other colour types are rejected
    /// rather than converted, since conversion would alter channel values.
    pub fn from_png_bytes(bytes: &[u8]) -> Result<Self> {
        let img = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)?;
        match img {
            image::DynamicImage::ImageRgba8(buf) => {
                let (w, h) = buf.dimensions();
                Self::from_rgba(w, h, buf.into_raw())
            }
            other => Err(Error::Raster(format!(
                "expected an 8-bit RGBA PNG, got {:?}",
                other.color()
            ))),
        }
    }

    /// Loads by extension: `.png` or `.raw`.
    pub fn load(path: &Path) -> Result<Self> {
        let bytes =
            std::fs::read(path).map_err(|e| Error::Raster(format!("{}: {e}", path.display())))?;
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("png") => Self::from_png_bytes(&bytes),
            Some(e) if e.eq_ignore_ascii_case("raw") => Self::from_raw_bytes(&bytes),
            _ => Err(Error::Raster(format!(
                "{}: unsupported raster extension (expected .png or .raw)",
                path.display()
            ))),
        }
    }

    pub fn to_png_bytes(&self) -> Result<Vec<u8>> {
        let buf = image::RgbaImage::from_raw(self.width, self.height, self.data.clone())
            .ok_or_else(|| Error::Raster("buffer size mismatch".into()))?;
        let mut out = std::io::Cursor::new(Vec::new());
        buf.write_to(&mut out, image::ImageFormat::Png)?;
        Ok(out.into_inner())
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn is_conforming(&self) -> bool {
        self.width == CONFORMING_SIZE && self.height == CONFORMING_SIZE
    }

    fn idx(&self, row: u32, col: u32) -> usize {
        (row as usize * self.width as usize + col as usize) * 4
    }

    /// Channel value, `channel` in `0..4`.
    pub fn get(&self, channel: usize, row: u32, col: u32) -> u8 {
        self.data[self.idx(row, col) + channel]
    }

    pub fn set(&mut self, channel: usize, row: u32, col: u32, value: u8) {
        let i = self.idx(row, col) + channel;
        self.data[i] = value;
    }

    pub fn category(&self, row: u32, col: u32) -> u8 {
        self.get(2, row, col)
    }

    pub fn instance(&self, row: u32, col: u32) -> u8 {
        self.get(3, row, col)
    }
}

/// Maps channel-3 values to room types.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryMap {
    #[serde(with = "u8_keys")]
    pub values: BTreeMap<u8, String>,
    #[serde(default)]
    pub non_room: BTreeSet<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

mod u8_keys {
    use std::collections::BTreeMap;

    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<u8, String>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(m.iter().map(|(k, v)| (k.to_string(), v)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<u8, String>, D::Error> {
        let raw: BTreeMap<String, String> = BTreeMap::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| {
                k.trim().parse::<u8>().map(|k| (k, v)).map_err(|_| {
                    D::Error::custom(format!("category key {k:?} is not a value in 0..=255"))
                })
            })
            .collect()
    }
}

impl CategoryMap {
    pub fn from_json(text: &str) -> Result<Self> {
        let map: CategoryMap =
            serde_json::from_str(text).map_err(|e| Error::CategoryMap(e.to_string()))?;
        if let Some(v) = map.values.keys().find(|v| map.non_room.contains(v)) {
            return Err(Error::CategoryMap(format!(
                "value {v} is listed both as a room type and as non-room"
            )));
        }
        Ok(map)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::CategoryMap(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn is_room(&self, value: u8) -> Result<bool> {
        if self.values.contains_key(&value) {
            Ok(true)
        } else if self.non_room.contains(&value) {
            Ok(false)
        } else {
            Err(Error::UnmappedCategory(value))
        }
    }

    /// First channel-3 value mapped to `room_type`.
    pub fn value_of(&self, room_type: &str) -> Option<u8> {
        self.values
            .iter()
            .find(|(_, t)| t.as_str() == room_type)
            .map(|(v, _)| *v)
    }
}

/// One 4-connected component of pixels sharing a (ch3, ch4) key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoomMask {
    pub category: u8,
    pub instance: u8,
    /// `(row, col)` pairs in raster scan order.
    pub pixels: Vec<(u32, u32)>,
}

impl RoomMask {
    pub fn key(&self) -> (u8, u8) {
        (self.category, self.instance)
    }
}

/// Splits the raster into room masks, ordered by the scan position of each
/// mask's first pixel.
pub fn extract_room_masks(r: &RasterPlan, cmap: &CategoryMap) -> Result<Vec<RoomMask>> {
    const NONE: u32 = u32::MAX;
    let (w, h) = (r.width as usize, r.height as usize);
    let mut room_value = [None::<bool>; 256];
    let key_at = |i: usize| (r.data[i * 4 + 2], r.data[i * 4 + 3]);
    // component label per pixel, assigned in scan order of first pixels
    let mut label = vec![NONE; w * h];
    let mut keys = Vec::new();
    let mut stack = Vec::new();
    for start in 0..w * h {
        if label[start] != NONE {
            continue;
        }
        let key = key_at(start);
        let is_room = match room_value[key.0 as usize] {
            Some(b) => b,
            None => {
                let b = cmap.is_room(key.0)?;
                room_value[key.0 as usize] = Some(b);
                b
            }
        };
        if !is_room {
            continue;
        }
        let id = keys.len() as u32;
        keys.push(key);
        label[start] = id;
        stack.push(start);
        while let Some(at) = stack.pop() {
            let (row, col) = (at / w, at % w);
            let neighbours = [
                (row > 0).then(|| at - w),
                (row + 1 < h).then(|| at + w),
                (col > 0).then(|| at - 1),
                (col + 1 < w).then(|| at + 1),
            ];
            for n in neighbours.into_iter().flatten() {
                if label[n] == NONE && key_at(n) == key {
                    label[n] = id;
                    stack.push(n);
                }
            }
        }
    }
    let mut masks: Vec<RoomMask> = keys
        .into_iter()
        .map(|(category, instance)| RoomMask {
            category,
            instance,
            pixels: Vec::new(),
        })
        .collect();
    for (at, &l) in label.iter().enumerate() {
        if l != NONE {
            masks[l as usize]
                .pixels
                .push(((at / w) as u32, (at % w) as u32));
        }
    }
    Ok(masks)
}

/// Unit steps on the lattice, y down: right, down, left, up.
const STEPS: [(i64, i64); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];

/// Follows the cell-boundary lattice of a mask once around and returns the
/// corner vertices in canonical orientation.
///
/// Boundary edges are directed so the mask lies on their right (clockwise on
/// screen). Where the boundary touches itself diagonally the trace prefers
/// the left turn, which keeps the outer ring in one piece. Any boundary edge
/// not reached by the trace belongs to a hole.
pub fn trace_perimeter(m: &RoomMask) -> Result<Polygon> {
    let Some(&(r0, c0)) = m.pixels.iter().min() else {
        return Err(crate::error::GeometryError::TooFewVertices(0).into());
    };
    let rmin = m.pixels.iter().map(|p| p.0).min().unwrap_or(0) as i64;
    let rmax = m.pixels.iter().map(|p| p.0).max().unwrap_or(0) as i64;
    let cmin = m.pixels.iter().map(|p| p.1).min().unwrap_or(0) as i64;
    let cmax = m.pixels.iter().map(|p| p.1).max().unwrap_or(0) as i64;
    // cells padded by one on every side; lattice points cover the padded box
    let (w, h) = ((cmax - cmin + 3) as usize, (rmax - rmin + 3) as usize);
    let mut inside = vec![false; w * h];
    for &(r, c) in &m.pixels {
        inside[(r as i64 - rmin + 1) as usize * w + (c as i64 - cmin + 1) as usize] = true;
    }
    let cell = |r: usize, c: usize| inside[r * w + c];

    // out[p] has bit d set when a boundary edge leaves lattice point p in
    // direction STEPS[d]
    let lw = w + 1;
    let mut out = vec![0u8; lw * (h + 1)];
    let mut total = 0usize;
    for r in 1..h - 1 {
        for c in 1..w - 1 {
            if !cell(r, c) {
                continue;
            }
            let mut add = |x: usize, y: usize, d: u8| {
                out[y * lw + x] |= 1 << d;
                total += 1;
            };
            if !cell(r - 1, c) {
                add(c, r, 0);
            }
            if !cell(r, c + 1) {
                add(c + 1, r, 1);
            }
            if !cell(r + 1, c) {
                add(c + 1, r + 1, 2);
            }
            if !cell(r, c - 1) {
                add(c, r + 1, 3);
            }
        }
    }

    let to_world = |x: usize, y: usize| {
        Vertex::new((x as i64 - 1 + cmin) as f64, (y as i64 - 1 + rmin) as f64)
    };
    let start = (
        (c0 as i64 - cmin + 1) as usize,
        (r0 as i64 - rmin + 1) as usize,
    );
    let mut ring: Vec<Vertex> = vec![to_world(start.0, start.1)];
    // first step is along the top edge of the top-left pixel
    out[start.1 * lw + start.0] &= !1;
    let mut used = 1usize;
    let mut dir = 0usize;
    let mut cur = (start.0 + 1, start.1);
    while cur != start {
        let bits = out[cur.1 * lw + cur.0];
        // left of d is d + 3 (mod 4) with y down, right is d + 1
        let next = [(dir + 3) % 4, dir, (dir + 1) % 4]
            .into_iter()
            .find(|d| bits & (1 << d) != 0)
            .ok_or_else(|| {
                let v = to_world(cur.0, cur.1);
                Error::Raster(format!(
                    "broken boundary at lattice point ({}, {})",
                    v.x, v.y
                ))
            })?;
        out[cur.1 * lw + cur.0] &= !(1 << next);
        used += 1;
        if next != dir {
            ring.push(to_world(cur.0, cur.1));
        }
        dir = next;
        let (dx, dy) = STEPS[next];
        cur = ((cur.0 as i64 + dx) as usize, (cur.1 as i64 + dy) as usize);
    }
    if used != total {
        return Err(Error::MaskHasHole { key: m.key() });
    }
    let polygon = Polygon::new(ring)?;
    Ok(geometry::canonicalize(&geometry::simplify_collinear(
        &polygon,
    )?))
}

/// Converts a raster into a canonical floorplan. Rooms are named `room|k`
/// in scan order of their first pixel, starting at 0.
pub fn convert_raster(
    r: &RasterPlan,
    cmap: &CategoryMap,
    adjacency_threshold: f64,
) -> Result<Floorplan> {
    let masks = extract_room_masks(r, cmap)?;
    let mut rooms = Vec::with_capacity(masks.len());
    for (k, m) in masks.iter().enumerate() {
        rooms.push(RoomGeometry {
            id: format!("room|{k}"),
            room_type: cmap.values[&m.category].clone(),
            polygon: trace_perimeter(m)?,
        });
    }
    let mut fp = derive_fields(rooms)?;
    fp.edges = bubble::extract_bubble(&fp, adjacency_threshold).edge_list();
    Ok(fp)
}

fn point_in_polygon(p: &Polygon, x: f64, y: f64) -> bool {
    let mut inside = false;
    for (a, b) in p.edges() {
        if (a.y > y) != (b.y > y) {
            let xi = a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y);
            if x < xi {
                inside = !inside;
            }
        }
    }
    inside
}

/// Paints a floorplan onto a raster by pixel-centre sampling.
///
/// Each room gets the first channel-3 value mapped to its type and a
/// per-type instance number in channel 4; channel 2 is set to 255 inside
/// rooms. Pixels outside every room take the smallest non-room value.
pub fn rasterize(
    fp: &Floorplan,
    cmap: &CategoryMap,
    width: u32,
    height: u32,
) -> Result<RasterPlan> {
    let background = *cmap
        .non_room
        .iter()
        .next()
        .ok_or_else(|| Error::CategoryMap("no non-room value to use as background".into()))?;
    let mut raster = RasterPlan::filled(width, height, background);
    let mut per_type: HashMap<&str, u8> = HashMap::new();
    for room in &fp.rooms {
        let value = cmap.value_of(&room.room_type).ok_or_else(|| {
            Error::CategoryMap(format!("no value for room type {:?}", room.room_type))
        })?;
        let counter = per_type.entry(room.room_type.as_str()).or_insert(0);
        *counter = counter.wrapping_add(1);
        let instance = *counter;
        let bb = geometry::bounding_box(&room.floor_polygon);
        let r0 = bb.y0.floor().max(0.0) as u32;
        let r1 = (bb.y1.ceil().max(0.0) as u32).min(height);
        let c0 = bb.x0.floor().max(0.0) as u32;
        let c1 = (bb.x1.ceil().max(0.0) as u32).min(width);
        for row in r0..r1 {
            for col in c0..c1 {
                if point_in_polygon(&room.floor_polygon, col as f64 + 0.5, row as f64 + 0.5) {
                    raster.set(1, row, col, 255);
                    raster.set(2, row, col, value);
                    raster.set(3, row, col, instance);
                }
            }
        }
    }
    Ok(raster)
}
