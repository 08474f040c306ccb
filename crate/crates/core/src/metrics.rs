//! Self-consistency and prompt-consistency scoring.
//!
//! Ratio metrics compare a measured value with a reference (stated or
//! requested) value and lie in `[0, 1]`, higher is better. Indicator metrics
//! are 0 or 1; `sc/Overlap` and `Compatibility` are lower-is-better.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::bubble::{self, BubbleDiagram};
use crate::geometry::{self, EPS};
use crate::model::Floorplan;
use crate::promptgen::{ConstraintSet, PromptType};

pub const SC_TOTAL_AREA: &str = "sc/TotalArea";
pub const SC_POLYGON_AREA: &str = "sc/P.Area";
pub const SC_OVERLAP: &str = "sc/Overlap";
pub const SC_ID: &str = "sc/ID";
pub const SC_ROOM_COUNT: &str = "sc/R.Count";
pub const SC_HEIGHT: &str = "sc/R.H";
pub const SC_WIDTH: &str = "sc/R.W";
pub const PC_HEIGHT: &str = "pc/R.H";
pub const PC_WIDTH: &str = "pc/R.W";
pub const PC_TOTAL_AREA: &str = "pc/TotalArea";
pub const PC_NUM_ROOMS: &str = "pc/Num.R";
pub const PC_ID: &str = "pc/ID";
pub const PC_ROOM_AREA: &str = "pc/R.Area";
pub const PC_TYPE: &str = "pc/Type";
pub const PC_ID_VS_TYPE: &str = "pc/IDvsType";
pub const COMPATIBILITY: &str = "Compatibility";

/// Report column order.
pub const METRIC_ORDER: [&str; 16] = [
    SC_TOTAL_AREA,
    SC_POLYGON_AREA,
    SC_OVERLAP,
    SC_ID,
    SC_ROOM_COUNT,
    SC_HEIGHT,
    SC_WIDTH,
    PC_HEIGHT,
    PC_WIDTH,
    PC_TOTAL_AREA,
    PC_NUM_ROOMS,
    PC_ID,
    PC_ROOM_AREA,
    PC_TYPE,
    PC_ID_VS_TYPE,
    COMPATIBILITY,
];

/// The score a perfect generation receives.
pub fn ideal_value(metric: &str) -> f64 {
    match metric {
        SC_OVERLAP | COMPATIBILITY => 0.0,
        _ => 1.0,
    }
}

/// `clamp(1 - |measured - reference| / max(|reference|, 1e-9), 0, 1)`.
///
/// Relative errors at floating-point noise level (below 1e-9) count as
/// exact agreement, so sums of one-decimal numbers score 1.0.
pub fn ratio_score(measured: f64, reference: f64) -> f64 {
    if !measured.is_finite() || !reference.is_finite() {
        return 0.0;
    }
    let rel = (measured - reference).abs() / reference.abs().max(1e-9);
    if rel <= 1e-9 {
        return 1.0;
    }
    (1.0 - rel).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricScore {
    pub name: String,
    /// Headline value; `None` iff the metric is inapplicable.
    pub value: Option<f64>,
    /// Per-room or per-component raw scores. For `pc/ID` and `pc/Type` this
    /// is `[precision, recall]`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_item: Vec<f64>,
    pub applicable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl MetricScore {
    fn value(name: &str, value: f64, per_item: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            value: Some(value),
            per_item,
            applicable: true,
            note: None,
        }
    }

    fn indicator(name: &str, flag: bool) -> Self {
        Self::value(name, if flag { 1.0 } else { 0.0 }, Vec::new())
    }

    fn inapplicable(name: &str) -> Self {
        Self {
            name: name.into(),
            value: None,
            per_item: Vec::new(),
            applicable: false,
            note: None,
        }
    }

    fn mean_of(name: &str, per_item: Vec<f64>) -> Self {
        if per_item.is_empty() {
            return Self::inapplicable(name);
        }
        let m = mean(&per_item);
        Self::value(name, m, per_item)
    }

    fn with_note(mut self, note: Option<String>) -> Self {
        self.note = note;
        self
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn skipped_note(ids: &[&str], what: &str) -> Option<String> {
    (!ids.is_empty()).then(|| format!("{what}: {}", ids.join(", ")))
}

/// Checks how the numbers in a plan agree with each other and with its
/// polygons.
pub fn self_consistency(fp: &Floorplan) -> Vec<MetricScore> {
    let mut out = Vec::with_capacity(7);

    let stated_sum: f64 = fp.rooms.iter().map(|r| r.area).sum();
    out.push(MetricScore::value(
        SC_TOTAL_AREA,
        ratio_score(stated_sum, fp.total_area),
        Vec::new(),
    ));

    let mut degenerate = Vec::new();
    let mut areas = Vec::new();
    let mut heights = Vec::new();
    let mut widths = Vec::new();
    for r in &fp.rooms {
        let a = geometry::shoelace_area(&r.floor_polygon);
        if a <= EPS {
            degenerate.push(r.id.as_str());
            continue;
        }
        let bb = geometry::bounding_box(&r.floor_polygon);
        areas.push(ratio_score(a, r.area));
        heights.push(ratio_score(bb.height(), r.height));
        widths.push(ratio_score(bb.width(), r.width));
    }
    let note = skipped_note(&degenerate, "degenerate rooms excluded");
    out.push(MetricScore::mean_of(SC_POLYGON_AREA, areas).with_note(note.clone()));

    let mut irregular = Vec::new();
    let checkable: Vec<_> = fp
        .rooms
        .iter()
        .filter(|r| {
            let ok = geometry::is_rectilinear(&r.floor_polygon);
            if !ok {
                irregular.push(r.id.as_str());
            }
            ok
        })
        .collect();
    let mut overlap = false;
    'outer: for (i, a) in checkable.iter().enumerate() {
        for b in &checkable[i + 1..] {
            if geometry::polygons_overlap(&a.floor_polygon, &b.floor_polygon).unwrap_or(false) {
                overlap = true;
                break 'outer;
            }
        }
    }
    out.push(
        MetricScore::indicator(SC_OVERLAP, overlap)
            .with_note(skipped_note(&irregular, "non-rectilinear rooms excluded")),
    );

    let mut seen = HashSet::new();
    let distinct = fp.rooms.iter().all(|r| seen.insert(r.id.as_str()));
    out.push(MetricScore::indicator(SC_ID, distinct));
    out.push(MetricScore::indicator(
        SC_ROOM_COUNT,
        fp.room_count == fp.rooms.len() as u64,
    ));
    out.push(MetricScore::mean_of(SC_HEIGHT, heights).with_note(note.clone()));
    out.push(MetricScore::mean_of(SC_WIDTH, widths).with_note(note));
    out
}

fn precision_recall<T: std::hash::Hash + Eq + Clone>(
    generated: &[T],
    requested: &[T],
) -> (f64, f64) {
    let mut want: HashMap<T, usize> = HashMap::new();
    for x in requested {
        *want.entry(x.clone()).or_default() += 1;
    }
    let mut hits = 0usize;
    for x in generated {
        if let Some(n) = want.get_mut(x) {
            if *n > 0 {
                *n -= 1;
                hits += 1;
            }
        }
    }
    let p = if generated.is_empty() {
        0.0
    } else {
        hits as f64 / generated.len() as f64
    };
    let r = if requested.is_empty() {
        0.0
    } else {
        hits as f64 / requested.len() as f64
    };
    (p, r)
}

/// Headline for a precision/recall pair: their mean, or recall alone when
/// the prompt listed only some of the rooms (extra rooms are then expected
/// and precision says nothing about the generation).
fn pr_score(name: &str, (p, r): (f64, f64), partial: bool) -> MetricScore {
    let headline = if partial { r } else { (p + r) / 2.0 };
    let note = partial.then(|| "partial room list: headline is recall".to_string());
    MetricScore::value(name, headline, vec![p, r]).with_note(note)
}

/// Checks a generation against the constraints its prompt carried. Only
/// metrics whose constraint appears in `cs` are applicable.
pub fn prompt_consistency(fp: &Floorplan, cs: &ConstraintSet) -> Vec<MetricScore> {
    let by_id: HashMap<&str, &crate::model::Room> =
        fp.rooms.iter().rev().map(|r| (r.id.as_str(), r)).collect();
    let room_metric = |name: &str,
                       wanted: fn(&crate::promptgen::RoomConstraint) -> Option<f64>,
                       measure: fn(&crate::model::Room) -> f64| {
        let scores: Vec<f64> = cs
            .rooms
            .iter()
            .filter_map(|rc| {
                let target = wanted(rc)?;
                let got = rc.id.as_deref().and_then(|id| by_id.get(id));
                Some(got.map_or(0.0, |room| ratio_score(measure(room), target)))
            })
            .collect();
        MetricScore::mean_of(name, scores)
    };

    let mut out = Vec::with_capacity(8);
    out.push(room_metric(
        PC_HEIGHT,
        |rc| rc.height,
        |r| geometry::bounding_box(&r.floor_polygon).height(),
    ));
    out.push(room_metric(
        PC_WIDTH,
        |rc| rc.width,
        |r| geometry::bounding_box(&r.floor_polygon).width(),
    ));

    out.push(match cs.total_area {
        Some(t) => {
            let sum: f64 = fp
                .rooms
                .iter()
                .map(|r| geometry::shoelace_area(&r.floor_polygon))
                .sum();
            MetricScore::value(PC_TOTAL_AREA, ratio_score(sum, t), Vec::new())
        }
        None => MetricScore::inapplicable(PC_TOTAL_AREA),
    });
    out.push(match cs.room_count {
        Some(n) => MetricScore::value(
            PC_NUM_ROOMS,
            ratio_score(fp.rooms.len() as f64, n as f64),
            Vec::new(),
        ),
        None => MetricScore::inapplicable(PC_NUM_ROOMS),
    });

    let prompt_ids: Vec<&str> = cs.rooms.iter().filter_map(|r| r.id.as_deref()).collect();
    let gen_ids: Vec<&str> = fp.rooms.iter().map(|r| r.id.as_str()).collect();
    out.push(if prompt_ids.is_empty() {
        MetricScore::inapplicable(PC_ID)
    } else {
        pr_score(
            PC_ID,
            precision_recall(&gen_ids, &prompt_ids),
            cs.rooms_partial,
        )
    });

    out.push(room_metric(
        PC_ROOM_AREA,
        |rc| rc.area,
        |r| geometry::shoelace_area(&r.floor_polygon),
    ));

    let gen_types: Vec<&str> = fp.rooms.iter().map(|r| r.room_type.as_str()).collect();
    out.push(match &cs.room_types {
        Some(types) => {
            let want: Vec<&str> = types.iter().map(String::as_str).collect();
            pr_score(PC_TYPE, precision_recall(&gen_types, &want), false)
        }
        None => {
            let want: Vec<&str> = cs
                .rooms
                .iter()
                .filter_map(|r| r.room_type.as_deref())
                .collect();
            if want.is_empty() {
                MetricScore::inapplicable(PC_TYPE)
            } else {
                pr_score(
                    PC_TYPE,
                    precision_recall(&gen_types, &want),
                    cs.rooms_partial,
                )
            }
        }
    });

    let typed: Vec<(&str, &str)> = cs
        .rooms
        .iter()
        .filter_map(|r| Some((r.id.as_deref()?, r.room_type.as_deref()?)))
        .collect();
    out.push(if typed.is_empty() {
        MetricScore::inapplicable(PC_ID_VS_TYPE)
    } else {
        let wanted: HashSet<(&str, &str)> = typed.iter().copied().collect();
        let mut matched = HashSet::new();
        for r in &fp.rooms {
            let key = (r.id.as_str(), r.room_type.as_str());
            if wanted.contains(&key) {
                matched.insert(key);
            }
        }
        let v = (matched.len() as f64 / typed.len() as f64).clamp(0.0, 1.0);
        MetricScore::value(PC_ID_VS_TYPE, v, Vec::new())
    });
    out
}

/// Edit distance between the prompt's bubble diagram and the generation's.
pub fn compatibility_score(bd: &BubbleDiagram, fp: &Floorplan, threshold: f64) -> MetricScore {
    match bubble::compatibility(bd, fp, threshold) {
        Ok(d) => MetricScore::value(COMPATIBILITY, d as f64, Vec::new()),
        Err(e) => MetricScore::inapplicable(COMPATIBILITY).with_note(Some(e.to_string())),
    }
}

/// All scores for one generation, in report column order.
pub fn evaluate_plan(
    fp: &Floorplan,
    cs: Option<&ConstraintSet>,
    bd: Option<(&BubbleDiagram, f64)>,
) -> Vec<MetricScore> {
    let mut scores = self_consistency(fp);
    match cs {
        Some(cs) => scores.extend(prompt_consistency(fp, cs)),
        None => scores.extend(
            [
                PC_HEIGHT,
                PC_WIDTH,
                PC_TOTAL_AREA,
                PC_NUM_ROOMS,
                PC_ID,
                PC_ROOM_AREA,
                PC_TYPE,
                PC_ID_VS_TYPE,
            ]
            .map(MetricScore::inapplicable),
        ),
    }
    scores.push(match bd {
        Some((bd, t)) => compatibility_score(bd, fp, t),
        None => MetricScore::inapplicable(COMPATIBILITY),
    });
    scores
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanReport {
    pub index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt_type: Option<PromptType>,
    /// True when the generation needed lenient recovery to parse.
    #[serde(default)]
    pub recovered: bool,
    pub scores: Vec<MetricScore>,
}

impl PlanReport {
    pub fn score(&self, name: &str) -> Option<&MetricScore> {
        self.scores.iter().find(|s| s.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub metric: String,
    pub mean: Option<f64>,
    pub std: Option<f64>,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub index: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub seed: u64,
    pub plans: usize,
    pub parse_failures: usize,
    pub failures: Vec<Failure>,
    pub aggregate: Vec<Aggregate>,
    /// Aggregates restricted to each prompt type present.
    pub by_prompt_type: BTreeMap<String, Vec<Aggregate>>,
    pub per_plan: Vec<PlanReport>,
}

/// Mean and population standard deviation per metric over the plans where
/// it applies, in report column order.
pub fn aggregate(plans: &[PlanReport]) -> Vec<Aggregate> {
    METRIC_ORDER
        .iter()
        .map(|&metric| {
            let xs: Vec<f64> = plans
                .iter()
                .filter_map(|p| p.score(metric).and_then(|s| s.value))
                .collect();
            if xs.is_empty() {
                return Aggregate {
                    metric: metric.into(),
                    mean: None,
                    std: None,
                    n: 0,
                };
            }
            let m = mean(&xs);
            let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64;
            Aggregate {
                metric: metric.into(),
                mean: Some(m),
                std: Some(var.sqrt()),
                n: xs.len(),
            }
        })
        .collect()
}

impl EvalReport {
    pub fn build(seed: u64, per_plan: Vec<PlanReport>, failures: Vec<Failure>) -> Self {
        let mut by_prompt_type = BTreeMap::new();
        for t in PromptType::ALL {
            let subset: Vec<PlanReport> = per_plan
                .iter()
                .filter(|p| p.prompt_type == Some(t))
                .cloned()
                .collect();
            if !subset.is_empty() {
                by_prompt_type.insert(t.as_str().to_string(), aggregate(&subset));
            }
        }
        Self {
            seed,
            plans: per_plan.len() + failures.len(),
            parse_failures: failures.len(),
            aggregate: aggregate(&per_plan),
            by_prompt_type,
            per_plan,
            failures,
        }
    }

    /// One row per prompt type (or a single `all` row when prompt types are
    /// unknown); cells are `mean±std`, `-` when inapplicable.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rows");
        for m in METRIC_ORDER {
            out.push(',');
            out.push_str(m);
        }
        out.push('\n');
        let mut rows: Vec<(&str, &Vec<Aggregate>)> = self
            .by_prompt_type
            .iter()
            .map(|(k, v)| (k.as_str(), v))
            .collect();
        // BTreeMap order is alphabetical; present rows in prompt-type order.
        rows.sort_by_key(|(k, _)| PromptType::ALL.iter().position(|t| t.as_str() == *k));
        if rows.is_empty() {
            rows.push(("all", &self.aggregate));
        }
        for (label, aggs) in rows {
            out.push_str(label);
            for a in aggs {
                out.push(',');
                match (a.mean, a.std) {
                    (Some(m), Some(s)) => out.push_str(&format!("{m:.2}±{s:.2}")),
                    _ => out.push('-'),
                }
            }
            out.push('\n');
        }
        out
    }
}
