//! The `heursynth` command line.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use heursynth_core::search::{Algorithm, Limits, GIB};
use heursynth_core::{load_instance_file, HeuristicSpec, SearchResult, TaskModel};
use serde::{Deserialize, Serialize};

use crate::bench::{run_bench, suite_instances, BenchConfig};
use crate::compile::{CompileStatus, Compiler};
use crate::llm::{HttpSettings, LlmConfig, Provider};
use crate::orchestrator::{run_fc, run_tsr, BudgetPolicy, RunOutcome, Strategy, SynthSetup};
use crate::prompts::PromptOptions;
use crate::report::write_csv;
use crate::sandbox::run_worker;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_SOLVED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "heursynth", version, about = "Numeric planning with LLM-synthesized heuristics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search an instance with a built-in or compiled heuristic.
    Solve(SolveArgs),
    /// Synthesize heuristics with an LLM and search with them.
    Synth(SynthArgs),
    /// Check a plan file against an instance.
    Validate(ValidateArgs),
    /// Run configurations over a directory of instances and write a CSV report.
    Bench(BenchArgs),
}

#[derive(Debug, clap::Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub domain: String,
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value = "gbfs")]
    pub algorithm: Algorithm,
    /// blind, hmd, or plugin:PATH (a worker executable or a `.rs` heuristic source).
    #[arg(long, default_value = "hmd")]
    pub heuristic: HeuristicSpec,
    #[arg(long, default_value_t = 600.0)]
    pub time_limit: f64,
    #[arg(long, default_value_t = 8 * GIB)]
    pub memory_limit: u64,
    #[arg(long)]
    pub max_expansions: Option<u64>,
    #[arg(long)]
    pub plan_out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub domain: String,
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value = "tsr")]
    pub strategy: Strategy,
    #[arg(long, default_value = "offline")]
    pub model: String,
    #[arg(long, value_enum, default_value = "offline")]
    pub provider: Provider,
    #[arg(long, default_value = "fixtures/llm")]
    pub fixtures: PathBuf,
    #[arg(long, overrides_with = "no_strategize")]
    pub strategize: bool,
    #[arg(long, overrides_with = "strategize")]
    pub no_strategize: bool,
    #[arg(long, overrides_with = "no_refine")]
    pub refine: bool,
    #[arg(long, overrides_with = "refine")]
    pub no_refine: bool,
    /// Total seconds, API calls and compilation included.
    #[arg(long, default_value_t = 600.0)]
    pub budget: f64,
    #[arg(long, default_value_t = 100.0)]
    pub slice: f64,
    #[arg(long, default_value_t = 5)]
    pub max_heuristics: u32,
    #[arg(long, default_value_t = 10)]
    pub max_compile_retries: u32,
    #[arg(long, default_value_t = 8 * GIB)]
    pub memory_limit: u64,
    #[arg(long)]
    pub plan_out: Option<PathBuf>,
    /// Also write the full run record here.
    #[arg(long)]
    pub record_out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub domain: String,
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub plan: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub suite: PathBuf,
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// One JSON run record per line.
    #[arg(long)]
    pub records: Option<PathBuf>,
}

/// `{"domain": ..., "instance": <path>, "plan": [...]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanFile {
    pub domain: String,
    pub instance: PathBuf,
    pub plan: Vec<String>,
}

impl PlanFile {
    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self).expect("plan serializes") + "\n")
    }

    pub fn read(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

struct Fail(i32, String);

fn load(domain: &str, instance: &Path) -> Result<TaskModel, Fail> {
    let model = load_instance_file(instance).map_err(|e| Fail(EXIT_USAGE, format!("{}: {e}", instance.display())))?;
    if model.domain_name() != domain {
        return Err(Fail(
            EXIT_USAGE,
            format!("--domain {domain} does not match instance domain {}", model.domain_name()),
        ));
    }
    Ok(model)
}

fn write_plan(path: Option<&Path>, domain: &str, instance: &Path, plan: Option<&Vec<String>>) -> Result<(), Fail> {
    if let (Some(path), Some(plan)) = (path, plan) {
        let file = PlanFile { domain: domain.into(), instance: instance.to_path_buf(), plan: plan.clone() };
        file.write(path).map_err(|e| Fail(EXIT_INTERNAL, format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn solve(a: &SolveArgs) -> Result<i32, Fail> {
    let model = load(&a.domain, &a.instance)?;
    let limits = Limits { wall_clock_seconds: a.time_limit, memory_bytes: a.memory_limit, max_expansions: a.max_expansions };
    let result: SearchResult = match &a.heuristic {
        HeuristicSpec::Plugin(path) => {
            let worker = if path.extension().is_some_and(|e| e == "rs") {
                let source = std::fs::read_to_string(path).map_err(|e| Fail(EXIT_USAGE, format!("{}: {e}", path.display())))?;
                match Compiler::default().compile(&source, model.info(), None) {
                    Ok(CompileStatus::Ok(w)) => w,
                    Ok(CompileStatus::Failed(diag)) => return Err(Fail(EXIT_NOT_SOLVED, format!("compilation failed:\n{diag}"))),
                    Err(e) => return Err(Fail(EXIT_INTERNAL, e.to_string())),
                }
            } else {
                path.clone()
            };
            run_worker(&worker, &a.instance, a.algorithm, &limits)
        }
        h => model.search(a.algorithm, h, &limits).map_err(|e| Fail(EXIT_USAGE, e.to_string()))?,
    };
    if let Some(plan) = result.outcome.plan() {
        if !model.validate(plan).is_valid() {
            println!("{}", result.to_json());
            return Err(Fail(EXIT_INTERNAL, "search returned a plan that does not validate".into()));
        }
    }
    println!("{}", result.to_json());
    write_plan(a.plan_out.as_deref(), &a.domain, &a.instance, result.outcome.plan().map(|p| p.to_vec()).as_ref())?;
    Ok(if result.outcome.is_solved() { EXIT_OK } else { EXIT_NOT_SOLVED })
}

fn synth(a: &SynthArgs) -> Result<i32, Fail> {
    let model = load(&a.domain, &a.instance)?;
    let llm = match a.provider {
        Provider::Offline => LlmConfig::offline(&a.fixtures),
        Provider::Http => HttpSettings::from_env().map(|s| LlmConfig::http(&a.model, s)),
    }
    .map_err(|e| Fail(EXIT_USAGE, e.to_string()))?;
    let options = PromptOptions { strategize: !a.no_strategize, refine: a.refine };
    let compiler = Compiler::default();
    let setup = SynthSetup::new(&model, &a.instance, &llm, options, &compiler);
    let budget = BudgetPolicy {
        total_seconds: a.budget,
        slice_seconds: a.slice,
        memory_bytes: a.memory_limit,
        max_heuristics: a.max_heuristics,
        max_compile_retries: a.max_compile_retries,
    };
    let record = match a.strategy {
        Strategy::Fc => run_fc(&setup, &budget),
        Strategy::Tsr => run_tsr(&setup, &budget),
    }
    .map_err(|e| Fail(EXIT_USAGE, e.to_string()))?;
    let json = record.to_json();
    println!("{json}");
    if let Some(p) = &a.record_out {
        std::fs::write(p, json + "\n").map_err(|e| Fail(EXIT_INTERNAL, format!("{}: {e}", p.display())))?;
    }
    write_plan(a.plan_out.as_deref(), &a.domain, &a.instance, record.plan.as_ref())?;
    Ok(match record.outcome {
        RunOutcome::Solved => EXIT_OK,
        RunOutcome::Error => EXIT_INTERNAL,
        _ => EXIT_NOT_SOLVED,
    })
}

fn validate(a: &ValidateArgs) -> Result<i32, Fail> {
    let model = load(&a.domain, &a.instance)?;
    let file = PlanFile::read(&a.plan).map_err(|e| Fail(EXIT_USAGE, e))?;
    if file.domain != a.domain {
        return Err(Fail(EXIT_USAGE, format!("plan is for domain {}, not {}", file.domain, a.domain)));
    }
    let report = model.validate(&file.plan);
    println!("{}", serde_json::to_string(&report).expect("report serializes"));
    Ok(if report.is_valid() { EXIT_OK } else { EXIT_NOT_SOLVED })
}

fn bench(a: &BenchArgs) -> Result<i32, Fail> {
    let config = BenchConfig::load(&a.config).map_err(|e| Fail(EXIT_USAGE, e))?;
    let instances = suite_instances(&a.suite).map_err(|e| Fail(EXIT_USAGE, format!("{}: {e}", a.suite.display())))?;
    if instances.is_empty() {
        return Err(Fail(EXIT_USAGE, format!("no *.json instances in {}", a.suite.display())));
    }
    let compiler = Compiler::default();
    let records = run_bench(&instances, &config, &compiler, a.jobs);
    if let Some(p) = &a.records {
        let lines: Vec<String> = records.iter().map(|r| serde_json::to_string(r).expect("record serializes")).collect();
        std::fs::write(p, lines.join("\n") + "\n").map_err(|e| Fail(EXIT_INTERNAL, format!("{}: {e}", p.display())))?;
    }
    let file = std::fs::File::create(&a.report).map_err(|e| Fail(EXIT_INTERNAL, format!("{}: {e}", a.report.display())))?;
    let rows = write_csv(&records, file).map_err(|e| Fail(EXIT_INTERNAL, e.to_string()))?;
    for r in rows {
        eprintln!("{:<14} {:<20} {}/{}", r.domain, r.configuration, r.solved, r.attempted);
    }
    Ok(EXIT_OK)
}

pub fn run(cli: &Cli) -> i32 {
    let res = match &cli.command {
        Command::Solve(a) => solve(a),
        Command::Synth(a) => synth(a),
        Command::Validate(a) => validate(a),
        Command::Bench(a) => bench(a),
    };
    match res {
        Ok(code) => code,
        Err(Fail(code, msg)) => {
            eprintln!("heursynth: {msg}");
            code
        }
    }
}

pub fn main() -> i32 {
    run(&Cli::parse())
}
