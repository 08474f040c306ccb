use floorbench_core::bubble::extract_bubble;
use floorbench_core::geometry::{
    boundary_manhattan_distance, polygons_overlap, rect_decompose, shoelace_area, signed_area,
};
use floorbench_core::metrics::{evaluate_plan, ideal_value, self_consistency};
use floorbench_core::model::{derive_fields, parse_strict, serialize, RoomGeometry};
use floorbench_core::promptgen::{
    apply_preset_mask, apply_random_mask, make_generation_prompt, parse_specifications,
    render_full_prompt, ConstraintSet, PromptTemplate, PromptType,
};
use floorbench_core::raster::{convert_raster, rasterize, CategoryMap};
use floorbench_core::rng::seeded;
use floorbench_core::synth::{random_floorplan, random_raster, random_rectilinear_polygon};
use floorbench_core::{Floorplan, Polygon, Vertex, VertexKey};
use proptest::prelude::*;
use rand::Rng;

fn cmap() -> CategoryMap {
    CategoryMap::from_json(
        r#"{"values": {"0": "LivingRoom", "1": "MasterRoom", "2": "Kitchen", "3": "Bathroom", "4": "DiningRoom"},
            "non_room": [13, 14, 15]}"#,
    )
    .unwrap()
}

/// Plans on a 0.1 grid; rooms may overlap.
fn decimal_plan(seed: u64) -> Floorplan {
    let mut rng = seeded(seed);
    let n = rng.gen_range(0..6);
    let rooms = (0..n)
        .map(|k| RoomGeometry {
            id: format!("room|{k}"),
            room_type: ["Bedroom", "Kitchen", "Bathroom"][k % 3].into(),
            polygon: random_rectilinear_polygon(&mut rng, 8).0,
        })
        .collect();
    derive_fields(rooms).unwrap()
}

fn sampled_boundary(p: &Polygon, step: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for (a, b) in p.edges() {
        let len = ((b.x - a.x).powi(2) + (b.y - a.y).powi(2)).sqrt();
        let k = (len / step).ceil().max(1.0) as usize;
        for i in 0..=k {
            let t = i as f64 / k as f64;
            out.push((a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)));
        }
    }
    out
}

fn arbitrary_polygon() -> impl Strategy<Value = Polygon> {
    prop::collection::vec((0.0f64..4.0, 0.0f64..4.0), 3..6).prop_filter_map(
        "non-degenerate",
        |pts| {
            let p = Polygon::from_coords(&pts).ok()?;
            (signed_area(&p).abs() > 0.05).then_some(p)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn serialization_round_trip_is_a_fixed_point(seed in any::<u64>()) {
        let fp = decimal_plan(seed);
        for key in [VertexKey::Y, VertexKey::Z] {
            let text = serialize(&fp, key);
            let back = parse_strict(&text).floorplan.unwrap();
            prop_assert_eq!(&back, &fp);
            prop_assert_eq!(serialize(&back, key), text);
        }
    }

    #[test]
    fn derive_fields_is_idempotent(seed in any::<u64>()) {
        let fp = decimal_plan(seed);
        prop_assert_eq!(derive_fields(fp.geometry()).unwrap(), fp);
    }

    #[test]
    fn shoelace_invariances(seed in any::<u64>(), dx in -50i32..50, dy in -50i32..50, k in 0usize..16) {
        let (p, cells) = random_rectilinear_polygon(&mut seeded(seed), 10);
        let a = shoelace_area(&p);
        let tol = 1e-9 * a.max(1.0);
        prop_assert!((a - cells as f64 * 0.01).abs() <= 1e-9);
        prop_assert!((shoelace_area(&p.translated(dx as f64 / 10.0, dy as f64 / 10.0)) - a).abs() <= tol);
        prop_assert!((shoelace_area(&p.rotated(k % p.len())) - a).abs() <= tol);
        prop_assert!((shoelace_area(&p.reversed()) - a).abs() <= tol);
        let rects: f64 = rect_decompose(&p).unwrap().iter().map(|r| r.area()).sum();
        prop_assert!((rects - a).abs() <= 1e-9);
    }

    #[test]
    fn overlap_is_symmetric(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (a, _) = random_rectilinear_polygon(&mut seeded(s1), 6);
        let (b, _) = random_rectilinear_polygon(&mut seeded(s2), 6);
        prop_assert_eq!(polygons_overlap(&a, &b).unwrap(), polygons_overlap(&b, &a).unwrap());
        prop_assert!(polygons_overlap(&a, &a).unwrap());
    }

    #[test]
    fn bubble_edges_grow_with_threshold(seed in any::<u64>(), t1 in 0.0f64..6.0, dt in 0.0f64..6.0) {
        let fp = random_floorplan(&mut seeded(seed), 8, 2.0);
        let small = extract_bubble(&fp, t1).edge_list();
        let large = extract_bubble(&fp, t1 + dt).edge_list();
        for e in &small {
            prop_assert!(large.contains(e));
        }
    }

    #[test]
    fn masks_never_empty_and_only_remove(seed in any::<u64>(), mask_seed in any::<u64>()) {
        let fp = random_floorplan(&mut seeded(seed), 8, 2.0);
        let full = ConstraintSet::full(&fp);
        for cs in [apply_random_mask(&full, mask_seed), apply_preset_mask(&full, mask_seed).constraints] {
            prop_assert!(!cs.is_empty());
            if let Some(n) = cs.room_count { prop_assert_eq!(n, fp.room_count); }
            if let Some(t) = cs.total_area { prop_assert_eq!(t, fp.total_area); }
            for r in &cs.rooms {
                let id = r.id.as_deref().unwrap();
                let room = fp.room(id).unwrap();
                prop_assert_eq!(r.area, Some(room.area));
            }
        }
        prop_assert_eq!(apply_random_mask(&full, mask_seed), apply_random_mask(&full, mask_seed));
    }

    #[test]
    fn specifications_round_trip(seed in any::<u64>(), t in 0usize..4) {
        let fp = random_floorplan(&mut seeded(seed), 8, 2.0);
        let ps = make_generation_prompt(&fp, PromptType::ALL[t], seed, true, 2.0);
        prop_assume!(!ps.constraint_set.is_empty());
        let text = render_full_prompt(&ps, &PromptTemplate::default()).unwrap();
        let mut expected = ps.constraint_set.clone();
        expected.rooms_partial = false;
        prop_assert_eq!(parse_specifications(&text).unwrap(), expected);
    }

    #[test]
    fn ratio_metrics_stay_in_unit_interval(s1 in any::<u64>(), s2 in any::<u64>(), t in 0usize..4) {
        let truth = random_floorplan(&mut seeded(s1), 8, 2.0);
        let generated = decimal_plan(s2);
        let ps = make_generation_prompt(&truth, PromptType::ALL[t], s1, false, 2.0);
        for m in evaluate_plan(&generated, Some(&ps.constraint_set), None) {
            if let Some(v) = m.value {
                prop_assert!((0.0..=1.0).contains(&v), "{} = {}", m.name, v);
            }
            prop_assert_eq!(m.value.is_some(), m.applicable);
        }
    }

    #[test]
    fn derived_plans_are_self_consistent(seed in any::<u64>()) {
        let fp = random_floorplan(&mut seeded(seed), 8, 2.0);
        for m in self_consistency(&fp) {
            prop_assert_eq!(m.value, Some(ideal_value(&m.name)), "{}", m.name);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn distance_matches_sampling(a in arbitrary_polygon(), b in arbitrary_polygon(), dx in 0.0f64..6.0) {
        let b = b.translated(dx, 0.0);
        let exact = boundary_manhattan_distance(&a, &b);
        let pa = sampled_boundary(&a, 0.01);
        let pb = sampled_boundary(&b, 0.01);
        let sampled = pa
            .iter()
            .flat_map(|p| pb.iter().map(move |q| (p.0 - q.0).abs() + (p.1 - q.1).abs()))
            .fold(f64::INFINITY, f64::min);
        prop_assert!(sampled >= exact - 1e-9, "sampled {} < exact {}", sampled, exact);
        prop_assert!(sampled - exact <= 0.02, "sampled {} exact {}", sampled, exact);
        prop_assert!((boundary_manhattan_distance(&b, &a) - exact).abs() <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn raster_round_trip(seed in any::<u64>()) {
        let cmap = cmap();
        let raster = random_raster(&mut seeded(seed), &cmap, 64, 6).unwrap();
        let first = convert_raster(&raster, &cmap, 8.0).unwrap();
        let again = convert_raster(&rasterize(&first, &cmap, 64, 64).unwrap(), &cmap, 8.0).unwrap();
        prop_assert_eq!(again, first);
    }
}

#[test]
fn translation_of_vertex_keeps_area() {
    let p = Polygon::new(vec![
        Vertex::new(0.0, 0.0),
        Vertex::new(0.0, 2.0),
        Vertex::new(3.0, 2.0),
        Vertex::new(3.0, 0.0),
    ])
    .unwrap();
    assert_eq!(shoelace_area(&p.translated(100.0, -40.0)), 6.0);
}
