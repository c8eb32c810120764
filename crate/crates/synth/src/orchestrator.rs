//! FirstCompilation and TimeSlicedRestarts strategies, plus in-process
//! baselines, all producing a [`RunRecord`].

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use heursynth_core::search::{Algorithm, Limits, Outcome, SearchResult, GIB};
use heursynth_core::{HeuristicSpec, TaskModel};
use serde::{Deserialize, Serialize};

use crate::compile::{CompileError, CompileStatus, Compiler};
use crate::llm::{request_heuristic, LlmConfig, LlmError, TranscriptRecord};
use crate::prompts::{build_prompts, Phase, PromptError, PromptOptions};
use crate::sandbox::run_worker;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetPolicy {
    pub total_seconds: f64,
    pub slice_seconds: f64,
    pub memory_bytes: u64,
    pub max_heuristics: u32,
    pub max_compile_retries: u32,
}

impl Default for BudgetPolicy {
    fn default() -> Self {
        BudgetPolicy {
            total_seconds: 600.0,
            slice_seconds: 100.0,
            memory_bytes: 8 * GIB,
            max_heuristics: 5,
            max_compile_retries: 10,
        }
    }
}

impl BudgetPolicy {
    pub fn check(&self) -> Result<(), String> {
        if !(self.total_seconds > 0.0 && self.slice_seconds > 0.0) {
            return Err("budget and slice must be positive".into());
        }
        if self.slice_seconds > self.total_seconds {
            return Err(format!("slice {} s exceeds total budget {} s", self.slice_seconds, self.total_seconds));
        }
        if self.memory_bytes == 0 || self.max_heuristics == 0 || self.max_compile_retries == 0 {
            return Err("memory, max heuristics and compile retries must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Fc,
    Tsr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunOutcome {
    Solved,
    Exhausted,
    TimedOut,
    MemoryOut,
    ExpansionLimit,
    HeuristicError,
    BudgetExhausted,
    CompileExhausted,
    /// The provider failed or the offline fixture schedule ran out.
    LlmError,
    /// A worker reported Solved but its plan did not validate.
    InvalidPlan,
    Error,
}

impl From<&Outcome> for RunOutcome {
    fn from(o: &Outcome) -> Self {
        match o {
            Outcome::Solved(_) => RunOutcome::Solved,
            Outcome::Exhausted => RunOutcome::Exhausted,
            Outcome::TimedOut => RunOutcome::TimedOut,
            Outcome::MemoryOut => RunOutcome::MemoryOut,
            Outcome::ExpansionLimit => RunOutcome::ExpansionLimit,
            Outcome::HeuristicError(_) => RunOutcome::HeuristicError,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttemptRecord {
    /// Starts at 1 and increases with every heuristic request.
    pub index: u32,
    pub phase: Phase,
    pub transcripts: Vec<TranscriptRecord>,
    pub llm_error: Option<String>,
    pub source: Option<String>,
    pub compile: Option<CompileStatus>,
    pub result: Option<SearchResult>,
    pub api_seconds: f64,
    pub compile_seconds: f64,
    pub search_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub domain: String,
    /// Row key in reports, e.g. `tsr`, `gbfs-hmd` or a bench config name.
    pub configuration: String,
    pub strategy: String,
    pub attempts: Vec<AttemptRecord>,
    pub outcome: RunOutcome,
    pub detail: Option<String>,
    pub plan: Option<Vec<String>>,
    pub api_seconds: f64,
    pub compile_seconds: f64,
    pub search_seconds: f64,
    pub wall_seconds: f64,
    pub input_tokens: u64,
    pub output_tokens: u64,
}

impl RunRecord {
    pub fn new(instance: &str, domain: &str, configuration: &str, strategy: &str) -> Self {
        RunRecord {
            instance: instance.into(),
            domain: domain.into(),
            configuration: configuration.into(),
            strategy: strategy.into(),
            attempts: Vec::new(),
            outcome: RunOutcome::Error,
            detail: None,
            plan: None,
            api_seconds: 0.0,
            compile_seconds: 0.0,
            search_seconds: 0.0,
            wall_seconds: 0.0,
            input_tokens: 0,
            output_tokens: 0,
        }
    }

    pub fn solved(&self) -> bool {
        self.outcome == RunOutcome::Solved
    }

    /// Attempts that obtained a reply from the model.
    pub fn requests(&self) -> usize {
        self.attempts.iter().filter(|a| !a.transcripts.is_empty()).count()
    }

    pub fn compile_attempts(&self) -> usize {
        self.attempts.iter().filter(|a| a.compile.is_some()).count()
    }

    pub fn compile_failures(&self) -> usize {
        self.attempts.iter().filter(|a| a.compile.as_ref().is_some_and(|c| !c.is_ok())).count()
    }

    pub fn worker_runs(&self) -> usize {
        self.attempts.iter().filter(|a| a.result.is_some()).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }

    fn push(&mut self, a: AttemptRecord) {
        self.api_seconds += a.api_seconds;
        self.compile_seconds += a.compile_seconds;
        self.search_seconds += a.search_seconds;
        for t in &a.transcripts {
            self.input_tokens += t.input_tokens;
            self.output_tokens += t.output_tokens;
        }
        self.attempts.push(a);
    }

    /// Sets the outcome from a worker result, re-validating solved plans.
    fn finish_with(&mut self, model: &TaskModel, result: &SearchResult) {
        self.outcome = RunOutcome::from(&result.outcome);
        match &result.outcome {
            Outcome::Solved(plan) => {
                let report = model.validate(plan);
                if report.is_valid() {
                    self.plan = Some(plan.clone());
                } else {
                    self.outcome = RunOutcome::InvalidPlan;
                    self.detail = Some(format!("{:?}", report.verdict));
                }
            }
            Outcome::HeuristicError(d) => self.detail = Some(d.clone()),
            _ => {}
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SetupError {
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error("budget: {0}")]
    Budget(String),
    #[error("cannot read instance: {0}")]
    Io(#[from] std::io::Error),
}

/// Everything a synthesis strategy needs besides its budget.
pub struct SynthSetup<'a> {
    pub model: &'a TaskModel,
    pub instance_path: PathBuf,
    pub instance_id: String,
    pub llm: &'a LlmConfig,
    pub options: PromptOptions,
    pub compiler: &'a Compiler,
    pub configuration: String,
}

impl<'a> SynthSetup<'a> {
    pub fn new(model: &'a TaskModel, instance_path: &Path, llm: &'a LlmConfig, options: PromptOptions, compiler: &'a Compiler) -> Self {
        SynthSetup {
            model,
            instance_path: instance_path.to_path_buf(),
            instance_id: instance_path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
            llm,
            options,
            compiler,
            configuration: String::new(),
        }
    }
}

struct Clock {
    start: Instant,
    total: Duration,
}

impl Clock {
    fn remaining(&self) -> Duration {
        self.total.saturating_sub(self.start.elapsed())
    }
}

enum Step {
    /// A worker executable is ready.
    Compiled(PathBuf),
    CompileFailed,
    /// No further attempts can succeed.
    Stop(RunOutcome, String),
}

fn attempt_step(setup: &SynthSetup, bundle: &crate::prompts::PromptBundle, index: u32, clock: &Clock, record: &mut RunRecord) -> Step {
    let info = setup.model.info();
    let mut a = AttemptRecord {
        index,
        phase: bundle.final_phase(),
        transcripts: Vec::new(),
        llm_error: None,
        source: None,
        compile: None,
        result: None,
        api_seconds: 0.0,
        compile_seconds: 0.0,
        search_seconds: 0.0,
    };
    let t = Instant::now();
    let req = request_heuristic(setup.llm, bundle, info.name, index, Some(clock.remaining()));
    a.api_seconds = t.elapsed().as_secs_f64();
    let source = match req {
        Ok((src, tr)) => {
            a.transcripts = tr;
            src
        }
        Err((e, tr)) => {
            a.transcripts = tr;
            a.llm_error = Some(e.to_string());
            let stop = matches!(e, LlmError::FixtureMissing(_) | LlmError::Config(_));
            record.push(a);
            return if stop { Step::Stop(RunOutcome::LlmError, e.to_string()) } else { Step::CompileFailed };
        }
    };
    if clock.remaining().is_zero() {
        a.source = Some(source);
        record.push(a);
        return Step::Stop(RunOutcome::BudgetExhausted, "budget spent before compilation".into());
    }
    let t = Instant::now();
    let status = setup.compiler.compile(&source, info, Some(clock.remaining()));
    a.compile_seconds = t.elapsed().as_secs_f64();
    a.source = Some(source);
    match status {
        Ok(status) => {
            let step = match status.worker() {
                Some(p) => Step::Compiled(p.to_path_buf()),
                None => Step::CompileFailed,
            };
            a.compile = Some(status);
            record.push(a);
            step
        }
        Err(e @ CompileError::ToolchainMissing(_)) | Err(e @ CompileError::Template(_)) => {
            record.push(a);
            Step::Stop(RunOutcome::Error, e.to_string())
        }
    }
}

fn run_slice(setup: &SynthSetup, worker: &Path, seconds: f64, memory: u64, record: &mut RunRecord) -> SearchResult {
    let t = Instant::now();
    let limits = Limits::new(seconds, memory);
    let result = run_worker(worker, &setup.instance_path, Algorithm::Gbfs, &limits);
    let a = record.attempts.last_mut().expect("attempt recorded before its worker runs");
    a.search_seconds = t.elapsed().as_secs_f64();
    a.result = Some(result.clone());
    record.search_seconds += a.search_seconds;
    result
}

fn start(setup: &SynthSetup, budget: &BudgetPolicy, strategy: &str) -> Result<(RunRecord, crate::prompts::PromptBundle, Clock), SetupError> {
    budget.check().map_err(SetupError::Budget)?;
    let info = setup.model.info();
    let instance_json = if setup.options.refine { Some(std::fs::read_to_string(&setup.instance_path)?) } else { None };
    let bundle = build_prompts(info.source, &info.heuristic_signature(), instance_json.as_deref(), setup.options)?;
    let config = if setup.configuration.is_empty() { strategy } else { &setup.configuration };
    let record = RunRecord::new(&setup.instance_id, info.name, config, strategy);
    let clock = Clock { start: Instant::now(), total: Duration::from_secs_f64(budget.total_seconds) };
    Ok((record, bundle, clock))
}

/// FirstCompilation: request heuristics until one compiles, then give its
/// worker all remaining time.
pub fn run_fc(setup: &SynthSetup, budget: &BudgetPolicy) -> Result<RunRecord, SetupError> {
    let (mut record, bundle, clock) = start(setup, budget, "fc")?;
    let mut failures = 0;
    let mut index = 0;
    loop {
        if clock.remaining().is_zero() {
            record.outcome = RunOutcome::BudgetExhausted;
            break;
        }
        index += 1;
        match attempt_step(setup, &bundle, index, &clock, &mut record) {
            Step::Compiled(worker) => {
                let secs = clock.remaining().as_secs_f64();
                if secs <= 0.0 {
                    record.outcome = RunOutcome::BudgetExhausted;
                    break;
                }
                let r = run_slice(setup, &worker, secs, budget.memory_bytes, &mut record);
                record.finish_with(setup.model, &r);
                break;
            }
            Step::CompileFailed => {
                failures += 1;
                if failures >= budget.max_compile_retries {
                    record.outcome = RunOutcome::CompileExhausted;
                    break;
                }
            }
            Step::Stop(o, d) => {
                record.outcome = o;
                record.detail = Some(d);
                break;
            }
        }
    }
    record.wall_seconds = clock.start.elapsed().as_secs_f64();
    Ok(record)
}

/// TimeSlicedRestarts: every compiled heuristic gets one slice; failed
/// compilations cost time but not a slot.
pub fn run_tsr(setup: &SynthSetup, budget: &BudgetPolicy) -> Result<RunRecord, SetupError> {
    let (mut record, bundle, clock) = start(setup, budget, "tsr")?;
    let (mut failures, mut runs, mut index) = (0, 0, 0);
    let mut last: Option<SearchResult> = None;
    record.outcome = RunOutcome::BudgetExhausted;
    while runs < budget.max_heuristics {
        if clock.remaining().is_zero() {
            last = None;
            break;
        }
        index += 1;
        match attempt_step(setup, &bundle, index, &clock, &mut record) {
            Step::Compiled(worker) => {
                let secs = clock.remaining().as_secs_f64().min(budget.slice_seconds);
                if secs <= 0.0 {
                    last = None;
                    break;
                }
                runs += 1;
                let r = run_slice(setup, &worker, secs, budget.memory_bytes, &mut record);
                let solved = r.outcome.is_solved();
                last = Some(r);
                if solved {
                    break;
                }
            }
            Step::CompileFailed => {
                failures += 1;
                if failures >= budget.max_compile_retries {
                    last = None;
                    record.outcome = RunOutcome::CompileExhausted;
                    break;
                }
            }
            Step::Stop(o, d) => {
                last = None;
                record.outcome = o;
                record.detail = Some(d);
                break;
            }
        }
    }
    if let Some(r) = last {
        record.finish_with(setup.model, &r);
    }
    record.wall_seconds = clock.start.elapsed().as_secs_f64();
    Ok(record)
}

/// Single in-process search with a built-in heuristic.
pub fn run_builtin(
    model: &TaskModel,
    instance_id: &str,
    heuristic: &HeuristicSpec,
    algorithm: Algorithm,
    limits: &Limits,
) -> Result<RunRecord, heursynth_core::ModelError> {
    let config = match algorithm {
        Algorithm::Bfs => "bfs".to_string(),
        Algorithm::Gbfs => format!("gbfs-{heuristic}"),
    };
    let mut record = RunRecord::new(instance_id, model.domain_name(), &config, "builtin");
    let start = Instant::now();
    let r = model.search(algorithm, heuristic, limits)?;
    record.search_seconds = start.elapsed().as_secs_f64();
    record.wall_seconds = record.search_seconds;
    record.finish_with(model, &r);
    Ok(record)
}
