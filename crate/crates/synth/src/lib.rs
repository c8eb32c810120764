//! Heuristic synthesis: prompts, LLM clients, worker compilation, sandboxed
//! execution, the FC and TSR strategies, and reporting.

pub mod bench;
pub mod cli;
pub mod compile;
pub mod extract;
pub mod llm;
pub mod orchestrator;
pub mod prompts;
pub mod report;
pub mod sandbox;

pub use compile::{compile_heuristic, CompileError, CompileStatus, Compiler};
pub use extract::extract_code;
pub use llm::{request_heuristic, LlmConfig, LlmError, Provider, TranscriptRecord};
pub use orchestrator::{run_builtin, run_fc, run_tsr, BudgetPolicy, RunOutcome, RunRecord, Strategy, SynthSetup};
pub use prompts::{build_prompts, Phase, PromptBundle, PromptError, PromptOptions};
pub use report::{report, summarize, ReportError, ReportRow};
pub use sandbox::run_worker;
