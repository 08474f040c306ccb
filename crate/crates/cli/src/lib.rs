//! Batch commands behind the `floorbench` binary. Each command takes its
//! inputs as text or paths and returns its artifacts in memory so runs can
//! be compared byte for byte.

pub mod commands;
mod records;

pub use commands::{Batch, EvaluateOptions, PromptOptions, RenderOptions};
pub use records::{GenerationRecord, PromptRecord};
