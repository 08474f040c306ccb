use floorbench_core::bubble::extract_bubble;
use floorbench_core::bubble::{BubbleDiagram, BubbleNode};
use floorbench_core::metrics::{self, ratio_score};
use floorbench_core::model::{parse_lenient, parse_strict, serialize};
use floorbench_core::promptgen::{
    apply_preset_mask, build_adjacency_string, build_constraint_string, make_generation_prompt,
    normalize_prompt_whitespace, parse_specifications, render_full_prompt, ConstraintSet, Preset,
    PromptSpec, PromptTemplate, PromptType, QuoteStyle, RoomConstraint,
};
use floorbench_core::{geometry, Floorplan, VertexKey};

const FIXTURE: &str = include_str!("fixtures/five_room_generation.json");
const REFERENCE_PROMPT: &str = include_str!("fixtures/reference_prompt.txt");

fn fixture() -> Floorplan {
    let out = parse_strict(FIXTURE);
    assert!(out.diagnostics.is_empty(), "{:?}", out.diagnostics);
    out.floorplan.unwrap()
}

fn strip_ws(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

#[test]
fn parses_top_level_fields() {
    let fp = fixture();
    assert_eq!(fp.room_count, 5);
    assert_eq!(fp.total_area, 183.6);
    assert_eq!(fp.rooms.len(), 5);
    assert_eq!(
        fp.room_types,
        ["Bedroom", "Bathroom", "Bedroom", "Kitchen", "LivingRoom"]
    );
}

#[test]
fn y_and_z_keys_agree() {
    let with_y = FIXTURE.replace("\"z\"", "\"y\"");
    assert_eq!(parse_strict(&with_y).floorplan.unwrap(), fixture());
}

#[test]
fn serializes_back_to_the_same_document() {
    let fp = fixture();
    assert_eq!(strip_ws(&serialize(&fp, VertexKey::Z)), strip_ws(FIXTURE));
    let again = parse_strict(&serialize(&fp, VertexKey::Y))
        .floorplan
        .unwrap();
    assert_eq!(again, fp);
}

#[test]
fn lenient_recovers_wrapped_document() {
    let text = format!("Here is the plan: {FIXTURE} Done.");
    let out = parse_lenient(&text);
    assert!(out.recovered);
    assert_eq!(out.floorplan.unwrap(), fixture());
}

#[test]
fn self_consistency_golden_values() {
    let fp = fixture();
    let sc = metrics::self_consistency(&fp);
    let get = |n: &str| sc.iter().find(|m| m.name == n).unwrap().clone();

    assert_eq!(get(metrics::SC_TOTAL_AREA).value, Some(1.0));
    assert_eq!(get(metrics::SC_OVERLAP).value, Some(0.0));
    assert_eq!(get(metrics::SC_ROOM_COUNT).value, Some(1.0));
    assert_eq!(get(metrics::SC_ID).value, Some(1.0));

    let p_area = get(metrics::SC_POLYGON_AREA);
    let expected = [0.992, 0.977, 0.864, 0.996, 0.514];
    assert_eq!(p_area.per_item.len(), 5);
    for (got, want) in p_area.per_item.iter().zip(expected) {
        assert!((got - want).abs() <= 0.002, "{got} vs {want}");
    }
    assert!((p_area.value.unwrap() - 0.869).abs() <= 0.002);

    let rh = get(metrics::SC_HEIGHT);
    assert!((rh.per_item[1] - ratio_score(4.2, 4.3)).abs() < 1e-12);
    assert!((rh.per_item[1] - 0.977).abs() <= 0.001);
}

#[test]
fn polygon_areas_by_shoelace() {
    let fp = fixture();
    let areas: Vec<f64> = fp
        .rooms
        .iter()
        .map(|r| geometry::shoelace_area(&r.floor_polygon))
        .collect();
    let expected = [40.96, 26.88, 67.84, 36.55, 9.46];
    for (a, e) in areas.iter().zip(expected) {
        assert!((a - e).abs() < 1e-9, "{a} vs {e}");
    }
}

#[test]
fn bubble_edges_at_threshold_two() {
    let bd = extract_bubble(&fixture(), 2.0);
    let mut edges = bd.edge_list();
    for e in &mut edges {
        if e.0 > e.1 {
            std::mem::swap(&mut e.0, &mut e.1);
        }
    }
    edges.sort();
    let want: Vec<(String, String)> = [(4, 5), (4, 6), (5, 6), (6, 8), (6, 9), (8, 9)]
        .iter()
        .map(|(a, b)| (format!("room|{a}"), format!("room|{b}")))
        .collect();
    assert_eq!(edges, want);
}

#[test]
fn self_prompt_scores_perfectly_on_prompt_metrics_it_can_meet() {
    let fp = fixture();
    let ps = make_generation_prompt(&fp, PromptType::TotalArea, 12345, false, 2.0);
    assert_eq!(
        build_constraint_string(&ps.constraint_set, QuoteStyle::Json).unwrap(),
        r#"{"total_area": 183.6}"#
    );
    let all = make_generation_prompt(&fp, PromptType::AllRoomArea, 12345, false, 2.0);
    assert_eq!(all.constraint_set.rooms.len(), 5);
    assert!(all.constraint_set.total_area.is_none());
    assert!(all.constraint_set.room_count.is_none());
}

#[test]
fn preset_one_and_four_on_fixture() {
    let fp = fixture();
    let full = ConstraintSet::full(&fp);
    let mut seen = [false; 4];
    for seed in 0..200 {
        let out = apply_preset_mask(&full, seed);
        seen[out.preset.number() as usize - 1] = true;
        match out.preset {
            Preset::Totals => {
                let cs = out.constraints;
                assert_eq!(cs.room_count, Some(5));
                assert_eq!(cs.total_area, Some(183.6));
                assert_eq!(cs.room_types.as_ref().map(Vec::len), Some(5));
                assert!(cs.rooms.is_empty());
            }
            Preset::FullRooms => {
                let cs = out.constraints;
                assert_eq!(cs.rooms.len(), 5);
                assert!(cs.total_area.is_none());
                for r in &cs.rooms {
                    assert!(r.area.is_some() && r.id.is_some() && r.room_type.is_some());
                    assert!(r.height.is_none() && r.width.is_none());
                }
            }
            _ => {}
        }
    }
    assert!(seen.iter().all(|s| *s));
}

fn reference_inputs() -> PromptSpec {
    let node = |id: &str, t: &str| BubbleNode {
        id: id.into(),
        room_type: t.into(),
    };
    let bd = BubbleDiagram::new(
        vec![
            node("room|4", "Bedroom"),
            node("room|5", "Bathroom"),
            node("room|6", "Kitchen"),
            node("room|7", "LivingRoom"),
        ],
        [(4, 5), (4, 6), (4, 7), (5, 6), (5, 7), (6, 7)]
            .map(|(a, b)| (format!("room|{a}"), format!("room|{b}"))),
    );
    let room = |area: f64, id: &str, t: &str| RoomConstraint {
        area: Some(area),
        id: Some(id.into()),
        room_type: Some(t.into()),
        ..Default::default()
    };
    PromptSpec {
        constraint_set: ConstraintSet {
            room_count: Some(4),
            total_area: Some(146.8),
            rooms: vec![
                room(41.3, "room|4", "Bedroom"),
                room(27.5, "room|7", "LivingRoom"),
            ],
            ..Default::default()
        },
        adjacency: Some(bd),
        prompt_type: PromptType::Specific,
        seed: 12345,
    }
}

/// The reference text escapes single quotes with a backslash.
fn reference_text() -> String {
    REFERENCE_PROMPT.replace("\\'", "'")
}

#[test]
fn full_prompt_matches_reference() {
    let rendered = render_full_prompt(&reference_inputs(), &PromptTemplate::default()).unwrap();
    assert_eq!(
        normalize_prompt_whitespace(&rendered),
        normalize_prompt_whitespace(&reference_text())
    );
    assert!(rendered.ends_with("<|start_header_id|>assistant<|end_header_id|>"));
}

#[test]
fn adjacency_line_matches_reference() {
    let adj = build_adjacency_string(reference_inputs().adjacency.as_ref().unwrap());
    let reference = normalize_prompt_whitespace(&reference_text());
    assert!(reference.contains(&normalize_prompt_whitespace(&adj)));
    assert!(adj.ends_with(r#"(Kitchen/"room|6", LivingRoom/"room|7")"#));
}

#[test]
fn prompt_without_adjacency_drops_clause_and_sentence() {
    let mut ps = reference_inputs();
    ps.adjacency = None;
    let rendered = render_full_prompt(&ps, &PromptTemplate::default()).unwrap();
    assert!(!rendered.contains("adjacency constraints"));
    assert!(!rendered.contains("room1_type"));
    assert!(rendered.contains("specifications: {'room_count': 4"));

    ps.constraint_set = ConstraintSet::default();
    assert!(render_full_prompt(&ps, &PromptTemplate::default()).is_err());
}

#[test]
fn specifications_round_trip() {
    let ps = reference_inputs();
    let rendered = render_full_prompt(&ps, &PromptTemplate::default()).unwrap();
    assert_eq!(parse_specifications(&rendered).unwrap(), ps.constraint_set);
}

#[test]
fn evaluation_is_repeatable() {
    let fp = fixture();
    let cs = ConstraintSet::full(&fp);
    let a = metrics::evaluate_plan(&fp, Some(&cs), None);
    let b = metrics::evaluate_plan(&fp, Some(&cs), None);
    assert_eq!(a, b);
}
