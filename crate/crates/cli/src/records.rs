use floorbench_core::bubble::BubbleDiagram;
use floorbench_core::promptgen::{ConstraintSet, PromptType};
use serde::{Deserialize, Serialize};

/// One line of a prompts file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptRecord {
    pub index: usize,
    pub prompt: String,
    /// The source floorplan document.
    pub ground_truth: serde_json::Value,
    pub prompt_type: PromptType,
    /// Per-item seed the prompt was drawn with.
    pub seed: u64,
    pub constraints: ConstraintSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bubble_diagram: Option<BubbleDiagram>,
    pub bd_threshold: f64,
}

/// One line of a generations file: raw model output for prompt `index`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub index: usize,
    pub text: String,
}
