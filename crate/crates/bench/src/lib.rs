//! Deterministic inputs shared by the benchmarks.

use floorbench_core::bubble::{extract_bubble, BubbleDiagram};
use floorbench_core::raster::{CategoryMap, RasterPlan};
use floorbench_core::rng::seeded;
use floorbench_core::synth::{random_floorplan, random_raster};
use floorbench_core::Floorplan;

pub const CATEGORY_MAP: &str = include_str!("../../../data/rplan_category_map.json");

pub fn category_map() -> CategoryMap {
    CategoryMap::from_json(CATEGORY_MAP).expect("bundled category map parses")
}

pub fn floorplans(n: usize, max_rooms: usize, seed: u64) -> Vec<Floorplan> {
    let mut rng = seeded(seed);
    (0..n)
        .map(|_| random_floorplan(&mut rng, max_rooms, 2.0))
        .collect()
}

pub fn rasters(n: usize, max_rooms: usize, seed: u64) -> Vec<RasterPlan> {
    let cmap = category_map();
    let mut rng = seeded(seed);
    (0..n)
        .map(|_| random_raster(&mut rng, &cmap, 256, max_rooms).expect("synthetic raster"))
        .collect()
}

/// Bubble diagrams of `n` plans with exactly `rooms` rooms.
pub fn bubbles(n: usize, rooms: usize, seed: u64) -> Vec<BubbleDiagram> {
    let mut rng = seeded(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let fp = random_floorplan(&mut rng, rooms, 2.0);
        if fp.rooms.len() == rooms {
            out.push(extract_bubble(&fp, 2.0));
        }
    }
    out
}
