use std::collections::HashSet;

use floorbench_core::bubble::{
    compatibility, extract_bubble, graph_edit_distance, BubbleDiagram, BubbleNode, MAX_EXACT_NODES,
};
use floorbench_core::model::parse_strict;
use floorbench_core::rng::seeded;
use floorbench_core::Error;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn random_graph(rng: &mut ChaCha8Rng, max_nodes: usize, prefix: &str) -> BubbleDiagram {
    let n = rng.gen_range(0..=max_nodes);
    let nodes: Vec<BubbleNode> = (0..n)
        .map(|i| BubbleNode {
            id: format!("{prefix}{i}"),
            room_type: ["A", "B", "C"][rng.gen_range(0..3)].into(),
        })
        .collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.4) {
                edges.push((nodes[i].id.clone(), nodes[j].id.clone()));
            }
        }
    }
    BubbleDiagram::new(nodes, edges)
}

fn has_edge(g: &BubbleDiagram, a: usize, b: usize) -> bool {
    let (x, y) = (&g.nodes[a].id, &g.nodes[b].id);
    g.edges
        .iter()
        .any(|(p, q)| (p == x && q == y) || (p == y && q == x))
}

/// Cost of one complete assignment: `map[i]` is the image of node `i` of
/// `a` in `b`, or `None` when the node is deleted.
fn assignment_cost(a: &BubbleDiagram, b: &BubbleDiagram, map: &[Option<usize>]) -> u32 {
    let mut cost = 0;
    let mut used = vec![None; b.nodes.len()];
    for (i, m) in map.iter().enumerate() {
        match m {
            Some(j) => {
                used[*j] = Some(i);
                if a.nodes[i].room_type != b.nodes[*j].room_type {
                    cost += 1;
                }
            }
            None => cost += 1,
        }
    }
    cost += used.iter().filter(|u| u.is_none()).count() as u32;
    for i in 0..a.nodes.len() {
        for k in i + 1..a.nodes.len() {
            if has_edge(a, i, k) {
                let kept = matches!((map[i], map[k]), (Some(x), Some(y)) if has_edge(b, x, y));
                if !kept {
                    cost += 1;
                }
            }
        }
    }
    for x in 0..b.nodes.len() {
        for y in x + 1..b.nodes.len() {
            if has_edge(b, x, y) {
                let kept = matches!((used[x], used[y]), (Some(i), Some(k)) if has_edge(a, i, k));
                if !kept {
                    cost += 1;
                }
            }
        }
    }
    cost
}

/// Minimum over every partial injection from `a` into `b`.
fn brute_force_ged(a: &BubbleDiagram, b: &BubbleDiagram) -> u32 {
    fn go(
        a: &BubbleDiagram,
        b: &BubbleDiagram,
        map: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
    ) -> u32 {
        if map.len() == a.nodes.len() {
            return assignment_cost(a, b, map);
        }
        map.push(None);
        let mut best = go(a, b, map, used);
        map.pop();
        for j in 0..b.nodes.len() {
            if !used[j] {
                used[j] = true;
                map.push(Some(j));
                best = best.min(go(a, b, map, used));
                map.pop();
                used[j] = false;
            }
        }
        best
    }
    go(a, b, &mut Vec::new(), &mut vec![false; b.nodes.len()])
}

fn upper_bound(a: &BubbleDiagram, b: &BubbleDiagram) -> u32 {
    (a.nodes.len() + b.nodes.len() + a.edges.len() + b.edges.len()) as u32
}

#[test]
fn matches_brute_force_on_random_pairs() {
    let mut rng = seeded(2024);
    for _ in 0..150 {
        let a = random_graph(&mut rng, 6, "a");
        let b = random_graph(&mut rng, 6, "b");
        let exact = graph_edit_distance(&a, &b).unwrap();
        assert_eq!(exact, brute_force_ged(&a, &b), "{a:?}\n{b:?}");
        assert_eq!(exact, graph_edit_distance(&b, &a).unwrap());
        assert!(exact <= upper_bound(&a, &b));
        assert_eq!(graph_edit_distance(&a, &a).unwrap(), 0);
    }
}

#[test]
fn zero_for_relabelled_isomorphic_copies() {
    let mut rng = seeded(7);
    for _ in 0..50 {
        let a = random_graph(&mut rng, 7, "a");
        let mut perm: Vec<usize> = (0..a.nodes.len()).collect();
        perm.shuffle(&mut rng);
        let nodes: Vec<BubbleNode> = perm
            .iter()
            .map(|&i| BubbleNode {
                id: format!("z{i}"),
                room_type: a.nodes[i].room_type.clone(),
            })
            .collect();
        let rename = |id: &str| format!("z{}", &id[1..]);
        let edges = a.edges.iter().map(|(p, q)| (rename(p), rename(q)));
        let b = BubbleDiagram::new(nodes, edges);
        assert_eq!(graph_edit_distance(&a, &b).unwrap(), 0);
    }
}

#[test]
fn triangle_inequality_spot_checks() {
    let mut rng = seeded(99);
    for _ in 0..60 {
        let a = random_graph(&mut rng, 5, "a");
        let b = random_graph(&mut rng, 5, "b");
        let c = random_graph(&mut rng, 5, "c");
        let ab = graph_edit_distance(&a, &b).unwrap();
        let bc = graph_edit_distance(&b, &c).unwrap();
        let ac = graph_edit_distance(&a, &c).unwrap();
        assert!(ac <= ab + bc);
    }
}

#[test]
fn triangle_versus_path() {
    let nodes: Vec<BubbleNode> = ["x", "y", "z"]
        .iter()
        .map(|id| BubbleNode {
            id: id.to_string(),
            room_type: "Bedroom".into(),
        })
        .collect();
    let e = |a: &str, b: &str| (a.to_string(), b.to_string());
    let tri = BubbleDiagram::new(nodes.clone(), [e("x", "y"), e("y", "z"), e("x", "z")]);
    let path = BubbleDiagram::new(nodes, [e("x", "y"), e("y", "z")]);
    assert_eq!(graph_edit_distance(&tri, &path).unwrap(), 1);
}

#[test]
fn too_large_is_an_error() {
    let nodes: Vec<BubbleNode> = (0..=MAX_EXACT_NODES)
        .map(|i| BubbleNode {
            id: format!("n{i}"),
            room_type: "A".into(),
        })
        .collect();
    let g = BubbleDiagram::new(nodes, []);
    assert!(matches!(
        graph_edit_distance(&g, &g),
        Err(Error::GraphTooLarge { .. })
    ));
}

#[test]
fn compatibility_on_fixture_edits() {
    let fp = parse_strict(include_str!("fixtures/five_room_generation.json"))
        .floorplan
        .unwrap();
    let bd = extract_bubble(&fp, 2.0);
    assert_eq!(compatibility(&bd, &fp, 2.0).unwrap(), 0);

    for removed in 0..fp.rooms.len() {
        let mut smaller = fp.clone();
        let gone = smaller.rooms.remove(removed);
        smaller.room_count -= 1;
        let incident = bd
            .edges
            .iter()
            .filter(|(a, b)| *a == gone.id || *b == gone.id)
            .count() as u32;
        assert_eq!(
            compatibility(&bd, &smaller, 2.0).unwrap(),
            1 + incident,
            "removed {}",
            gone.id
        );
    }

    let mut retyped = fp.clone();
    retyped.rooms[3].room_type = "Storage".into();
    assert_eq!(compatibility(&bd, &retyped, 2.0).unwrap(), 1);

    let ids: HashSet<&str> = bd.nodes.iter().map(|n| n.id.as_str()).collect();
    assert_eq!(ids.len(), 5);
}
