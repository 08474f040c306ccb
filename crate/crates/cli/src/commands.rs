use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use floorbench_core::bubble::{extract_bubble, BubbleDiagram};
use floorbench_core::metrics::{evaluate_plan, EvalReport, Failure, PlanReport};
use floorbench_core::model::{parse_lenient, parse_strict, serialize_compact, to_json_value};
use floorbench_core::promptgen::{
    make_generation_prompt, render_full_prompt, PromptTemplate, PromptType,
};
use floorbench_core::raster::{convert_raster, CategoryMap, RasterPlan};
use floorbench_core::render::render_svg;
use floorbench_core::rng::derive_seed;
use floorbench_core::scene::{convert_scene, SceneRecord};
use floorbench_core::validate::validate as check_invariants;
use floorbench_core::{Diagnostic, Floorplan, VertexKey};
use rayon::prelude::*;

use crate::records::{GenerationRecord, PromptRecord};

/// Per-item results of a batch command, in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch<T> {
    pub items: Vec<T>,
    pub diagnostics: Vec<String>,
    pub total: usize,
}

impl<T> Batch<T> {
    pub fn failed(&self) -> usize {
        self.total - self.items.len()
    }

    pub fn all_failed(&self) -> bool {
        self.total > 0 && self.items.is_empty()
    }

    fn collect(results: Vec<(Result<T, String>, Vec<String>)>) -> Self {
        let total = results.len();
        let mut items = Vec::with_capacity(total);
        let mut diagnostics = Vec::new();
        for (r, notes) in results {
            diagnostics.extend(notes);
            match r {
                Ok(item) => items.push(item),
                Err(e) => diagnostics.push(e),
            }
        }
        Self {
            items,
            diagnostics,
            total,
        }
    }
}

/// Lines joined with `\n`, newline-terminated.
pub fn join_lines(lines: &[String]) -> String {
    let mut s = lines.join("\n");
    if !s.is_empty() {
        s.push('\n');
    }
    s
}

fn par_map<T: Sync, U: Send>(
    jobs: usize,
    items: &[T],
    f: impl Fn(usize, &T) -> U + Sync + Send,
) -> Result<Vec<U>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .context("building worker pool")?;
    Ok(pool.install(|| items.par_iter().enumerate().map(|(i, x)| f(i, x)).collect()))
}

fn first_error(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .find(|d| d.is_error())
        .map(ToString::to_string)
        .unwrap_or_else(|| "unparseable document".into())
}

/// A floorplans file holds either one JSON document (possibly pretty
/// printed) or one compact document per line.
pub fn split_documents(text: &str) -> Vec<&str> {
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    if lines.len() > 1 && serde_json::from_str::<serde_json::Value>(lines[0]).is_err() {
        return vec![text];
    }
    lines
}

pub fn read_floorplans(text: &str) -> Vec<Result<Floorplan, String>> {
    split_documents(text)
        .into_iter()
        .enumerate()
        .map(|(i, doc)| {
            let out = parse_strict(doc);
            out.floorplan
                .ok_or_else(|| format!("item {i}: {}", first_error(&out.diagnostics)))
        })
        .collect()
}

fn raster_inputs(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)
                .with_context(|| format!("reading {}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| {
                    matches!(
                        f.extension()
                            .and_then(|e| e.to_str())
                            .map(str::to_ascii_lowercase)
                            .as_deref(),
                        Some("png" | "raw")
                    )
                })
                .collect();
            found.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

/// Converts raster files (directories are expanded to their `.png` and
/// `.raw` files, ordered by file name) into floorplan lines.
pub fn convert_rasters(
    paths: &[PathBuf],
    cmap: &CategoryMap,
    threshold: f64,
    jobs: usize,
) -> Result<Batch<String>> {
    let files = raster_inputs(paths)?;
    let results = par_map(jobs, &files, |_, path| {
        let r = RasterPlan::load(path)
            .and_then(|r| convert_raster(&r, cmap, threshold))
            .map(|fp| serialize_compact(&fp, VertexKey::Y))
            .map_err(|e| format!("{}: {e}", path.display()));
        (r, Vec::new())
    })?;
    Ok(Batch::collect(results))
}

/// Converts a JSON-lines file of scene records into floorplan lines.
pub fn convert_scenes(text: &str, threshold: f64, jobs: usize) -> Result<Batch<String>> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .collect();
    let results = par_map(jobs, &lines, |_, &(n, line)| {
        let n = n + 1;
        match SceneRecord::from_json(line).and_then(|s| convert_scene(&s, threshold)) {
            Ok(conv) => (
                Ok(serialize_compact(&conv.floorplan, VertexKey::Y)),
                conv.diagnostics
                    .iter()
                    .map(|d| format!("line {n}: {d}"))
                    .collect(),
            ),
            Err(e) => (Err(format!("line {n}: {e}")), Vec::new()),
        }
    })?;
    Ok(Batch::collect(results))
}

#[derive(Debug, Clone)]
pub struct PromptOptions {
    pub prompt_type: PromptType,
    pub seed: u64,
    pub with_bd: bool,
    pub threshold: f64,
    pub template: PromptTemplate,
}

/// One prompt record per floorplan. Item `i` draws from
/// `derive_seed(seed, i)`.
pub fn make_prompts(text: &str, opts: &PromptOptions, jobs: usize) -> Result<Batch<String>> {
    let plans = read_floorplans(text);
    let results = par_map(jobs, &plans, |i, plan| {
        let r = plan.as_ref().map_err(Clone::clone).and_then(|fp| {
            let seed = derive_seed(opts.seed, i as u64);
            let ps =
                make_generation_prompt(fp, opts.prompt_type, seed, opts.with_bd, opts.threshold);
            let prompt =
                render_full_prompt(&ps, &opts.template).map_err(|e| format!("item {i}: {e}"))?;
            let record = PromptRecord {
                index: i,
                prompt,
                ground_truth: to_json_value(fp, VertexKey::Y),
                prompt_type: opts.prompt_type,
                seed,
                constraints: ps.constraint_set,
                bubble_diagram: ps.adjacency,
                bd_threshold: opts.threshold,
            };
            serde_json::to_string(&record).map_err(|e| format!("item {i}: {e}"))
        });
        (r, Vec::new())
    })?;
    Ok(Batch::collect(results))
}

#[derive(Debug, Clone)]
pub struct EvaluateOptions {
    pub seed: u64,
    pub jobs: usize,
}

/// Scores each generation against the prompt with the same index.
/// Generations that are missing or do not parse are listed as failures and
/// left out of the aggregates.
pub fn evaluate(
    prompts_text: &str,
    generations_text: &str,
    opts: &EvaluateOptions,
) -> Result<EvalReport> {
    let mut prompts = Vec::new();
    for (n, line) in prompts_text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: PromptRecord =
            serde_json::from_str(line).with_context(|| format!("prompts line {}", n + 1))?;
        prompts.push(rec);
    }
    let mut generations: BTreeMap<usize, String> = BTreeMap::new();
    for (n, line) in generations_text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: GenerationRecord =
            serde_json::from_str(line).with_context(|| format!("generations line {}", n + 1))?;
        if generations.insert(rec.index, rec.text).is_some() {
            bail!("generations line {}: duplicate index {}", n + 1, rec.index);
        }
    }

    let results = par_map(opts.jobs, &prompts, |_, p| -> Result<PlanReport, Failure> {
        let fail = |message: String| Failure {
            index: p.index,
            message,
        };
        let text = generations
            .get(&p.index)
            .ok_or_else(|| fail("no generation for this prompt".into()))?;
        let out = parse_lenient(text);
        let fp = out
            .floorplan
            .ok_or_else(|| fail(first_error(&out.diagnostics)))?;
        let bd = p.bubble_diagram.as_ref().map(|bd| (bd, p.bd_threshold));
        Ok(PlanReport {
            index: p.index,
            prompt_type: Some(p.prompt_type),
            recovered: out.recovered,
            scores: evaluate_plan(&fp, Some(&p.constraints), bd),
        })
    })?;
    let mut plans = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(p) => plans.push(p),
            Err(f) => failures.push(f),
        }
    }
    Ok(EvalReport::build(opts.seed, plans, failures))
}

#[derive(Debug, Clone)]
pub struct RenderOptions {
    pub with_bd: bool,
    pub threshold: f64,
}

/// One `(file name, svg)` pair per floorplan.
pub fn render(text: &str, opts: &RenderOptions, jobs: usize) -> Result<Batch<(String, String)>> {
    let plans = read_floorplans(text);
    let results = par_map(jobs, &plans, |i, plan| {
        let r = plan.as_ref().map_err(Clone::clone).map(|fp| {
            let overlay = opts.with_bd.then(|| {
                if fp.edges.is_empty() {
                    extract_bubble(fp, opts.threshold)
                } else {
                    BubbleDiagram::from_floorplan_edges(fp)
                }
            });
            (format!("plan_{i:04}.svg"), render_svg(fp, overlay.as_ref()))
        });
        (r, Vec::new())
    })?;
    Ok(Batch::collect(results))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub lines: Vec<String>,
    pub errors: usize,
    pub warnings: usize,
    pub documents: usize,
}

impl ValidationReport {
    pub fn passed(&self, strict: bool) -> bool {
        self.errors == 0 && (!strict || self.warnings == 0)
    }
}

/// Schema checks followed by invariant checks for every document.
pub fn validate(text: &str) -> ValidationReport {
    let docs = split_documents(text);
    let mut lines = Vec::new();
    let (mut errors, mut warnings) = (0, 0);
    for (i, doc) in docs.iter().enumerate() {
        let out = parse_strict(doc);
        let mut diags = out.diagnostics;
        if let Some(fp) = &out.floorplan {
            diags.extend(check_invariants(fp));
        }
        for d in diags {
            if d.is_error() {
                errors += 1;
            } else {
                warnings += 1;
            }
            lines.push(format!("item {i}: {d}"));
        }
    }
    ValidationReport {
        lines,
        errors,
        warnings,
        documents: docs.len(),
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}
