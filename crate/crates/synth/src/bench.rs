//! Running configurations over an instance suite.

use std::path::{Path, PathBuf};

use heursynth_core::search::{Algorithm, Limits, GIB};
use heursynth_core::{load_instance_file, HeuristicSpec};
use rayon::prelude::*;
use serde::Deserialize;

use crate::compile::Compiler;
use crate::llm::{HttpSettings, LlmConfig, Provider};
use crate::orchestrator::{run_builtin, run_fc, run_tsr, BudgetPolicy, RunOutcome, RunRecord, Strategy, SynthSetup};
use crate::prompts::PromptOptions;

fn default_time() -> f64 {
    600.0
}
fn default_memory() -> u64 {
    8 * GIB
}
fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RunConfig {
    Builtin {
        name: String,
        algorithm: Algorithm,
        #[serde(default = "default_heuristic")]
        heuristic: String,
        #[serde(default = "default_time")]
        time_limit: f64,
        #[serde(default = "default_memory")]
        memory_limit: u64,
    },
    Synth {
        name: String,
        strategy: Strategy,
        provider: Provider,
        #[serde(default)]
        model: Option<String>,
        #[serde(default)]
        fixtures: Option<PathBuf>,
        #[serde(default = "yes")]
        strategize: bool,
        #[serde(default)]
        refine: bool,
        #[serde(default)]
        budget: Option<BudgetOverrides>,
    },
}

fn default_heuristic() -> String {
    "blind".into()
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetOverrides {
    pub total_seconds: Option<f64>,
    pub slice_seconds: Option<f64>,
    pub memory_bytes: Option<u64>,
    pub max_heuristics: Option<u32>,
    pub max_compile_retries: Option<u32>,
}

impl BudgetOverrides {
    pub fn apply(&self) -> BudgetPolicy {
        let d = BudgetPolicy::default();
        BudgetPolicy {
            total_seconds: self.total_seconds.unwrap_or(d.total_seconds),
            slice_seconds: self.slice_seconds.unwrap_or(d.slice_seconds),
            memory_bytes: self.memory_bytes.unwrap_or(d.memory_bytes),
            max_heuristics: self.max_heuristics.unwrap_or(d.max_heuristics),
            max_compile_retries: self.max_compile_retries.unwrap_or(d.max_compile_retries),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub configurations: Vec<RunConfig>,
}

impl BenchConfig {
    /// Reads the config; relative fixture paths are taken from its directory.
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let mut cfg: BenchConfig = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for c in &mut cfg.configurations {
            if let RunConfig::Synth { fixtures: Some(f), .. } = c {
                if f.is_relative() {
                    *f = base.join(&*f);
                }
            }
        }
        Ok(cfg)
    }
}

impl RunConfig {
    pub fn name(&self) -> &str {
        match self {
            RunConfig::Builtin { name, .. } | RunConfig::Synth { name, .. } => name,
        }
    }
}

/// Sorted `*.json` instance files directly under `dir`.
pub fn suite_instances(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    out.sort();
    Ok(out)
}

fn failed(instance: &Path, config: &RunConfig, detail: String) -> RunRecord {
    let id = instance.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let mut r = RunRecord::new(&id, "", config.name(), "");
    r.outcome = RunOutcome::Error;
    r.detail = Some(detail);
    r
}

pub fn run_one(instance: &Path, config: &RunConfig, compiler: &Compiler) -> RunRecord {
    let model = match load_instance_file(instance) {
        Ok(m) => m,
        Err(e) => return failed(instance, config, e.to_string()),
    };
    let id = instance.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    match config {
        RunConfig::Builtin { name, algorithm, heuristic, time_limit, memory_limit } => {
            let h: HeuristicSpec = match heuristic.parse() {
                Ok(h) => h,
                Err(e) => return failed(instance, config, format!("{e}")),
            };
            match run_builtin(&model, &id, &h, *algorithm, &Limits::new(*time_limit, *memory_limit)) {
                Ok(mut r) => {
                    r.configuration = name.clone();
                    r
                }
                Err(e) => failed(instance, config, e.to_string()),
            }
        }
        RunConfig::Synth { name, strategy, provider, model: model_id, fixtures, strategize, refine, budget } => {
            let llm = match provider {
                Provider::Offline => match fixtures {
                    Some(f) => LlmConfig::offline(f),
                    None => return failed(instance, config, "offline provider needs `fixtures`".into()),
                },
                Provider::Http => HttpSettings::from_env().map(|s| LlmConfig::http(model_id.clone().unwrap_or_default(), s)),
            };
            let llm = match llm {
                Ok(l) => l,
                Err(e) => return failed(instance, config, e.to_string()),
            };
            let options = PromptOptions { strategize: *strategize, refine: *refine };
            let mut setup = SynthSetup::new(&model, instance, &llm, options, compiler);
            setup.configuration = name.clone();
            let policy = budget.clone().unwrap_or_default().apply();
            let run = match strategy {
                Strategy::Fc => run_fc(&setup, &policy),
                Strategy::Tsr => run_tsr(&setup, &policy),
            };
            run.unwrap_or_else(|e| failed(instance, config, e.to_string()))
        }
    }
}

/// Runs every configuration on every instance with at most `jobs` runs in
/// flight. Records come back in (instance, configuration) order.
pub fn run_bench(instances: &[PathBuf], config: &BenchConfig, compiler: &Compiler, jobs: usize) -> Vec<RunRecord> {
    let pairs: Vec<(&PathBuf, &RunConfig)> =
        instances.iter().flat_map(|i| config.configurations.iter().map(move |c| (i, c))).collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().expect("thread pool");
    pool.install(|| pairs.par_iter().map(|(i, c)| run_one(i, c, compiler)).collect())
}
