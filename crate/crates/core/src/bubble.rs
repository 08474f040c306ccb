//! Bubble diagrams: room adjacency graphs, their extraction from floorplans,
//! and the graph-edit-distance compatibility score.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry;
use crate::model::Floorplan;
use crate::num::natural_cmp;

/// Largest graph accepted by the exact edit-distance search.
pub const MAX_EXACT_NODES: usize = 12;

/// Slack on the inclusive threshold comparison.
const THRESHOLD_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BubbleNode {
    pub id: String,
    pub room_type: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BubbleDiagram {
    pub nodes: Vec<BubbleNode>,
    pub edges: Vec<(String, String)>,
}

impl BubbleDiagram {
    /// Builds a diagram, dropping self-loops, duplicate edges and edges whose
    /// endpoints are not nodes.
    pub fn new(nodes: Vec<BubbleNode>, edges: impl IntoIterator<Item = (String, String)>) -> Self {
        let ids: BTreeSet<&str> = nodes.iter().map(|n| n.id.as_str()).collect();
        let mut seen = BTreeSet::new();
        let mut kept = Vec::new();
        for (a, b) in edges {
            if a == b || !ids.contains(a.as_str()) || !ids.contains(b.as_str()) {
                continue;
            }
            let key = if a <= b {
                (a.clone(), b.clone())
            } else {
                (b.clone(), a.clone())
            };
            if seen.insert(key) {
                kept.push((a, b));
            }
        }
        Self { nodes, edges: kept }
    }

    /// The diagram stored in a floorplan's own `edges` field.
    pub fn from_floorplan_edges(fp: &Floorplan) -> Self {
        Self::new(nodes_of(fp), fp.edges.iter().cloned())
    }

    pub fn node(&self, id: &str) -> Option<&BubbleNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn edge_list(&self) -> Vec<(String, String)> {
        self.edges.clone()
    }

    /// Edges with endpoints ordered and the list sorted by id pair, using
    /// natural ordering so `room|4` precedes `room|10`.
    pub fn sorted_edges(&self) -> Vec<(&BubbleNode, &BubbleNode)> {
        let mut out: Vec<(&BubbleNode, &BubbleNode)> = self
            .edges
            .iter()
            .filter_map(|(a, b)| {
                let (na, nb) = (self.node(a)?, self.node(b)?);
                Some(if natural_cmp(&na.id, &nb.id).is_le() {
                    (na, nb)
                } else {
                    (nb, na)
                })
            })
            .collect();
        out.sort_by(|x, y| {
            natural_cmp(&x.0.id, &y.0.id).then_with(|| natural_cmp(&x.1.id, &y.1.id))
        });
        out
    }
}

fn nodes_of(fp: &Floorplan) -> Vec<BubbleNode> {
    fp.rooms
        .iter()
        .map(|r| BubbleNode {
            id: r.id.clone(),
            room_type: r.room_type.clone(),
        })
        .collect()
}

/// Connects every pair of rooms whose boundaries lie within `threshold`
/// Manhattan distance (inclusive). Nodes follow room order.
pub fn extract_bubble(fp: &Floorplan, threshold: f64) -> BubbleDiagram {
    let mut edges = Vec::new();
    for (i, a) in fp.rooms.iter().enumerate() {
        for b in &fp.rooms[i + 1..] {
            let d = geometry::boundary_manhattan_distance(&a.floor_polygon, &b.floor_polygon);
            if d <= threshold + THRESHOLD_EPS {
                edges.push((a.id.clone(), b.id.clone()));
            }
        }
    }
    BubbleDiagram::new(nodes_of(fp), edges)
}

/// How nodes of the two diagrams are put in correspondence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatchMode {
    /// Minimum over all node mappings; labels are room types.
    #[default]
    Typed,
    /// Nodes pair up by id; counts unmatched ids, type mismatches and the
    /// symmetric difference of id-pair edges.
    IdAnchored,
}

/// Dense form used by the search: labels as small integers, adjacency as
/// bit rows.
struct Graph {
    labels: Vec<u32>,
    adj: Vec<u16>,
}

impl Graph {
    fn build(bd: &BubbleDiagram, dict: &mut HashMap<String, u32>) -> Graph {
        let index: HashMap<&str, usize> = bd
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.as_str(), i))
            .collect();
        let labels = bd
            .nodes
            .iter()
            .map(|n| {
                let next = dict.len() as u32;
                *dict.entry(n.room_type.clone()).or_insert(next)
            })
            .collect();
        let mut adj = vec![0u16; bd.nodes.len()];
        for (a, b) in &bd.edges {
            if let (Some(&i), Some(&j)) = (index.get(a.as_str()), index.get(b.as_str())) {
                if i != j && adj[i] & (1 << j) == 0 {
                    adj[i] |= 1 << j;
                    adj[j] |= 1 << i;
                }
            }
        }
        Graph { labels, adj }
    }

    fn len(&self) -> usize {
        self.labels.len()
    }

    fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i] & (1 << j) != 0
    }
}

/// Exact graph edit distance under unit costs (node insert/delete/relabel,
/// edge insert/delete).
pub fn graph_edit_distance(a: &BubbleDiagram, b: &BubbleDiagram) -> Result<u32> {
    graph_edit_distance_with(a, b, MatchMode::Typed)
}

pub fn graph_edit_distance_with(
    a: &BubbleDiagram,
    b: &BubbleDiagram,
    mode: MatchMode,
) -> Result<u32> {
    match mode {
        MatchMode::Typed => typed_ged(a, b),
        MatchMode::IdAnchored => Ok(id_anchored_distance(a, b)),
    }
}

fn typed_ged(a: &BubbleDiagram, b: &BubbleDiagram) -> Result<u32> {
    for g in [a, b] {
        if g.nodes.len() > MAX_EXACT_NODES {
            return Err(Error::GraphTooLarge {
                nodes: g.nodes.len(),
                bound: MAX_EXACT_NODES,
            });
        }
    }
    let mut dict = HashMap::new();
    let ga = Graph::build(a, &mut dict);
    let gb = Graph::build(b, &mut dict);
    Ok(AStar::new(&ga, &gb).run())
}

#[derive(Clone)]
struct State {
    /// Target in `gb` for each processed node of `ga` (in search order);
    /// `None` means the node is deleted.
    mapping: Vec<Option<u8>>,
    used: u16,
    cost: u32,
    complete: bool,
}

struct AStar<'g> {
    ga: &'g Graph,
    gb: &'g Graph,
    /// Processing order over `ga`, highest degree first.
    order: Vec<usize>,
}

impl<'g> AStar<'g> {
    fn new(ga: &'g Graph, gb: &'g Graph) -> Self {
        let mut order: Vec<usize> = (0..ga.len()).collect();
        order.sort_by_key(|&i| Reverse(ga.adj[i].count_ones()));
        Self { ga, gb, order }
    }

    fn run(&self) -> u32 {
        let mut heap = BinaryHeap::new();
        let mut states: Vec<State> = Vec::new();
        let root = State {
            mapping: Vec::new(),
            used: 0,
            cost: 0,
            complete: false,
        };
        let root = if self.order.is_empty() {
            self.complete(root)
        } else {
            root
        };
        heap.push(Reverse((
            root.cost + self.lower_bound(&root),
            Reverse(0usize),
            0usize,
        )));
        states.push(root);

        while let Some(Reverse((_, _, id))) = heap.pop() {
            let state = states[id].clone();
            if state.complete {
                return state.cost;
            }
            let depth = state.mapping.len();
            let node = self.order[depth];
            let targets = (0..self.gb.len())
                .filter(|j| state.used & (1 << j) == 0)
                .map(|j| Some(j as u8))
                .chain(std::iter::once(None));
            for target in targets {
                let mut child = self.extend(&state, node, target);
                if child.mapping.len() == self.order.len() {
                    child = self.complete(child);
                }
                let f = child.cost + self.lower_bound(&child);
                let cid = states.len();
                heap.push(Reverse((f, Reverse(child.mapping.len()), cid)));
                states.push(child);
            }
        }
        unreachable!("search space always contains a complete mapping")
    }

    fn extend(&self, s: &State, node: usize, target: Option<u8>) -> State {
        let mut cost = s.cost;
        match target {
            None => cost += 1,
            Some(j) => {
                if self.ga.labels[node] != self.gb.labels[j as usize] {
                    cost += 1;
                }
            }
        }
        for (k, mk) in s.mapping.iter().enumerate() {
            let other = self.order[k];
            let in_a = self.ga.has_edge(node, other);
            let in_b = match (target, mk) {
                (Some(j), Some(m)) => self.gb.has_edge(j as usize, *m as usize),
                _ => false,
            };
            if in_a != in_b {
                cost += 1;
            }
        }
        let mut mapping = s.mapping.clone();
        mapping.push(target);
        State {
            mapping,
            used: target.map_or(s.used, |j| s.used | (1 << j)),
            cost,
            complete: false,
        }
    }

    /// Inserts every unused node of `gb` together with its incident edges.
    fn complete(&self, mut s: State) -> State {
        let unused: Vec<usize> = (0..self.gb.len())
            .filter(|j| s.used & (1 << j) == 0)
            .collect();
        s.cost += unused.len() as u32;
        let unused_mask: u16 = unused.iter().fold(0, |m, &j| m | (1 << j));
        let mut edges = 0u32;
        for i in 0..self.gb.len() {
            for j in (i + 1)..self.gb.len() {
                if self.gb.has_edge(i, j)
                    && (unused_mask & (1 << i) != 0 || unused_mask & (1 << j) != 0)
                {
                    edges += 1;
                }
            }
        }
        s.cost += edges;
        s.complete = true;
        s
    }

    /// Admissible estimate of the cost still to pay: label-multiset bound on
    /// the remaining nodes plus the difference in not-yet-settled edges.
    fn lower_bound(&self, s: &State) -> u32 {
        if s.complete {
            return 0;
        }
        let depth = s.mapping.len();
        let remaining_a = &self.order[depth..];
        let remaining_b: Vec<usize> = (0..self.gb.len())
            .filter(|j| s.used & (1 << j) == 0)
            .collect();

        let mut counts: HashMap<u32, i32> = HashMap::new();
        for &i in remaining_a {
            *counts.entry(self.ga.labels[i]).or_default() += 1;
        }
        let mut common = 0;
        for &j in &remaining_b {
            if let Some(c) = counts.get_mut(&self.gb.labels[j]) {
                if *c > 0 {
                    *c -= 1;
                    common += 1;
                }
            }
        }
        let node_lb = remaining_a.len().max(remaining_b.len()) - common;

        let processed_a: u16 = self.order[..depth].iter().fold(0, |m, &i| m | (1 << i));
        let mut edges_a = 0usize;
        for i in 0..self.ga.len() {
            for j in (i + 1)..self.ga.len() {
                if self.ga.has_edge(i, j)
                    && (processed_a & (1 << i) == 0 || processed_a & (1 << j) == 0)
                {
                    edges_a += 1;
                }
            }
        }
        let mut edges_b = 0usize;
        for i in 0..self.gb.len() {
            for j in (i + 1)..self.gb.len() {
                if self.gb.has_edge(i, j) && (s.used & (1 << i) == 0 || s.used & (1 << j) == 0) {
                    edges_b += 1;
                }
            }
        }
        (node_lb + edges_a.abs_diff(edges_b)) as u32
    }
}

fn id_anchored_distance(a: &BubbleDiagram, b: &BubbleDiagram) -> u32 {
    let mut cost = 0u32;
    for n in &a.nodes {
        match b.node(&n.id) {
            Some(m) if m.room_type != n.room_type => cost += 1,
            Some(_) => {}
            None => cost += 1,
        }
    }
    cost += b.nodes.iter().filter(|n| a.node(&n.id).is_none()).count() as u32;
    let key = |(x, y): &(String, String)| {
        if x <= y {
            (x.clone(), y.clone())
        } else {
            (y.clone(), x.clone())
        }
    };
    let ea: BTreeSet<_> = a.edges.iter().map(key).collect();
    let eb: BTreeSet<_> = b.edges.iter().map(key).collect();
    cost + ea.symmetric_difference(&eb).count() as u32
}

/// Edit distance between an input diagram and the diagram extracted from a
/// generated plan; lower is better.
pub fn compatibility(input: &BubbleDiagram, generated: &Floorplan, threshold: f64) -> Result<u32> {
    compatibility_with(input, generated, threshold, MatchMode::Typed)
}

pub fn compatibility_with(
    input: &BubbleDiagram,
    generated: &Floorplan,
    threshold: f64,
    mode: MatchMode,
) -> Result<u32> {
    graph_edit_distance_with(input, &extract_bubble(generated, threshold), mode)
}
