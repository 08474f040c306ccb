use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use floorbench_cli::commands::{self, join_lines, read_text, Batch};
use floorbench_cli::{EvaluateOptions, PromptOptions, RenderOptions};
use floorbench_core::promptgen::{PromptTemplate, PromptType};
use floorbench_core::raster::{CategoryMap, RASTER_ADJACENCY_THRESHOLD};
use floorbench_core::rng::DEFAULT_SEED;
use floorbench_core::scene::SCENE_ADJACENCY_THRESHOLD;

#[derive(Parser)]
#[command(
    name = "floorbench",
    version,
    about = "Floorplan conversion, prompting and evaluation"
)]
struct Cli {
    /// Global seed for every random choice.
    #[arg(long, global = true, env = "FLOORBENCH_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads; output order does not depend on this.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Source {
    Raster,
    Scene,
}

#[derive(Clone, Copy, ValueEnum)]
enum PromptKind {
    Specific,
    AllRoomArea,
    PartialRoomArea,
    TotalArea,
}

impl From<PromptKind> for PromptType {
    fn from(k: PromptKind) -> Self {
        match k {
            PromptKind::Specific => PromptType::Specific,
            PromptKind::AllRoomArea => PromptType::AllRoomArea,
            PromptKind::PartialRoomArea => PromptType::PartialRoomArea,
            PromptKind::TotalArea => PromptType::TotalArea,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Convert rasters or scene records into floorplan JSON lines.
    Convert {
        #[arg(long, value_enum)]
        source: Source,
        /// Raster category map (required for rasters).
        #[arg(long)]
        category_map: Option<PathBuf>,
        /// Adjacency threshold; 8 for rasters, 2 for scenes by default.
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Raster files or directories, or one scene JSON-lines file.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Build prompts from ground-truth floorplans.
    Prompt {
        #[arg(long, value_enum, default_value = "specific")]
        prompt_type: PromptKind,
        /// Attach the bubble diagram as adjacency constraints.
        #[arg(long)]
        with_bd: bool,
        /// Adjacency threshold for the bubble diagram.
        #[arg(long, default_value_t = SCENE_ADJACENCY_THRESHOLD)]
        threshold: f64,
        /// JSON file overriding header tokens and instruction text.
        #[arg(long)]
        template: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        floorplans: PathBuf,
    },
    /// Score generations against their prompts.
    Evaluate {
        #[arg(long)]
        prompts: PathBuf,
        #[arg(long)]
        generations: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw floorplans as SVG files.
    Render {
        /// Overlay the bubble diagram.
        #[arg(long)]
        with_bd: bool,
        /// Adjacency threshold used when a plan carries no edges.
        #[arg(long, default_value_t = SCENE_ADJACENCY_THRESHOLD)]
        threshold: f64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        floorplans: PathBuf,
    },
    /// Check floorplan documents against the schema and invariants.
    Validate {
        /// Treat warnings as failures.
        #[arg(long)]
        strict: bool,
        file: PathBuf,
    },
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn report<T>(name: &str, batch: &Batch<T>) -> bool {
    for d in &batch.diagnostics {
        eprintln!("{d}");
    }
    eprintln!(
        "{name}: {} ok, {} failed",
        batch.items.len(),
        batch.failed()
    );
    !batch.all_failed()
}

fn run(cli: Cli) -> Result<bool> {
    let jobs = cli.jobs;
    match cli.command {
        Command::Convert {
            source,
            category_map,
            threshold,
            out,
            inputs,
        } => {
            let batch = match source {
                Source::Raster => {
                    let Some(path) = category_map else {
                        bail!("--category-map is required for raster sources");
                    };
                    let cmap = CategoryMap::load(&path)?;
                    let t = threshold.unwrap_or(RASTER_ADJACENCY_THRESHOLD);
                    commands::convert_rasters(&inputs, &cmap, t, jobs)?
                }
                Source::Scene => {
                    let mut text = String::new();
                    for p in &inputs {
                        text.push_str(&read_text(p)?);
                        if !text.ends_with('\n') {
                            text.push('\n');
                        }
                    }
                    commands::convert_scenes(
                        &text,
                        threshold.unwrap_or(SCENE_ADJACENCY_THRESHOLD),
                        jobs,
                    )?
                }
            };
            emit(out.as_deref(), &join_lines(&batch.items))?;
            Ok(report("convert", &batch))
        }
        Command::Prompt {
            prompt_type,
            with_bd,
            threshold,
            template,
            out,
            floorplans,
        } => {
            let template = match template {
                Some(p) => serde_json::from_str::<PromptTemplate>(&read_text(&p)?)
                    .with_context(|| format!("parsing template {}", p.display()))?,
                None => PromptTemplate::default(),
            };
            let opts = PromptOptions {
                prompt_type: prompt_type.into(),
                seed: cli.seed,
                with_bd,
                threshold,
                template,
            };
            let batch = commands::make_prompts(&read_text(&floorplans)?, &opts, jobs)?;
            emit(out.as_deref(), &join_lines(&batch.items))?;
            Ok(report("prompt", &batch))
        }
        Command::Evaluate {
            prompts,
            generations,
            format,
            out,
        } => {
            let rep = commands::evaluate(
                &read_text(&prompts)?,
                &read_text(&generations)?,
                &EvaluateOptions {
                    seed: cli.seed,
                    jobs,
                },
            )?;
            let text = match format {
                Format::Json => serde_json::to_string_pretty(&rep)? + "\n",
                Format::Csv => rep.to_csv(),
            };
            emit(out.as_deref(), &text)?;
            for f in &rep.failures {
                eprintln!("item {}: {}", f.index, f.message);
            }
            eprintln!(
                "evaluate: {} scored, {} failed",
                rep.per_plan.len(),
                rep.parse_failures
            );
            Ok(rep.plans == 0 || !rep.per_plan.is_empty())
        }
        Command::Render {
            with_bd,
            threshold,
            out,
            floorplans,
        } => {
            let batch = commands::render(
                &read_text(&floorplans)?,
                &RenderOptions { with_bd, threshold },
                jobs,
            )?;
            std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            for (name, svg) in &batch.items {
                let p = out.join(name);
                std::fs::write(&p, svg).with_context(|| format!("writing {}", p.display()))?;
            }
            Ok(report("render", &batch))
        }
        Command::Validate { strict, file } => {
            let rep = commands::validate(&read_text(&file)?);
            for l in &rep.lines {
                println!("{l}");
            }
            eprintln!(
                "validate: {} documents, {} errors, {} warnings",
                rep.documents, rep.errors, rep.warnings
            );
            Ok(rep.passed(strict))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
