mod common;

use std::path::Path;

use common::*;
use heursynth::orchestrator::SetupError;
use heursynth::{run_builtin, run_fc, run_tsr, summarize, BudgetPolicy, LlmConfig, PromptOptions, ReportError, RunOutcome, RunRecord, SynthSetup};
use heursynth_core::search::{Algorithm, Limits, GIB};
use heursynth_core::HeuristicSpec;

fn budget(total: f64, slice: f64) -> BudgetPolicy {
    BudgetPolicy { total_seconds: total, slice_seconds: slice, memory_bytes: GIB, ..BudgetPolicy::default() }
}

fn synth(dir: &Path, instance_name: &str, options: PromptOptions, f: impl FnOnce(&SynthSetup) -> RunRecord) -> RunRecord {
    let model = load(instance_name);
    let llm = LlmConfig::offline(dir).unwrap();
    let setup = SynthSetup::new(&model, &instance(instance_name), &llm, options, compiler());
    f(&setup)
}

fn counters_schedule(names: &[&str]) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let sources: Vec<String> = names.iter().map(|n| snippet(n)).collect();
    let replies: Vec<_> = sources.iter().map(|s| reply(s)).collect();
    schedule(dir.path(), "counters", &replies);
    dir
}

#[test]
fn fc_compiles_until_success() {
    let dir = counters_schedule(&["counters_broken.rs", "counters_wrong_signature.rs", "counters_good.rs"]);
    let r = synth(dir.path(), "counters_n3.json", PromptOptions::default(), |s| run_fc(s, &budget(120.0, 100.0)).unwrap());
    assert_eq!(r.outcome, RunOutcome::Solved, "{:?}", r.detail);
    assert_eq!(r.compile_attempts(), 3);
    assert_eq!(r.compile_failures(), 2);
    assert_eq!(r.worker_runs(), 1);
    assert_eq!(r.attempts.iter().map(|a| a.index).collect::<Vec<_>>(), [1, 2, 3]);
    assert!(load("counters_n3.json").validate(r.plan.as_ref().unwrap()).is_valid());
    assert_eq!(r.strategy, "fc");
}

#[test]
fn fc_gives_up_after_compile_retries() {
    let dir = counters_schedule(&["counters_broken.rs"; 4]);
    let policy = BudgetPolicy { max_compile_retries: 3, ..budget(120.0, 100.0) };
    let r = synth(dir.path(), "counters_n3.json", PromptOptions::default(), |s| run_fc(s, &policy).unwrap());
    assert_eq!(r.outcome, RunOutcome::CompileExhausted);
    assert_eq!(r.compile_attempts(), 3);
    assert_eq!(r.worker_runs(), 0);
    assert!(r.plan.is_none());
}

#[test]
fn fc_gives_a_looping_heuristic_all_remaining_time() {
    let dir = counters_schedule(&["counters_looping.rs", "counters_good.rs"]);
    let r = synth(dir.path(), "counters_n3.json", PromptOptions::default(), |s| run_fc(s, &budget(8.0, 8.0)).unwrap());
    assert_eq!(r.outcome, RunOutcome::TimedOut);
    assert_eq!(r.attempts.len(), 1);
    assert!(r.wall_seconds < 8.0 + 1.0, "{}", r.wall_seconds);
}

#[test]
fn exhausted_fixture_schedule_is_an_llm_error() {
    let dir = counters_schedule(&["counters_broken.rs"]);
    let r = synth(dir.path(), "counters_n3.json", PromptOptions::default(), |s| run_fc(s, &budget(120.0, 100.0)).unwrap());
    assert_eq!(r.outcome, RunOutcome::LlmError);
    assert_eq!(r.attempts.len(), 2);
    assert!(r.attempts[1].llm_error.is_some());
}

#[test]
fn tsr_restarts_after_a_failed_worker() {
    let dir = counters_schedule(&["counters_panic.rs", "counters_broken.rs", "counters_good.rs"]);
    let r = synth(dir.path(), "counters_n3.json", PromptOptions::default(), |s| run_tsr(s, &budget(120.0, 5.0)).unwrap());
    assert_eq!(r.outcome, RunOutcome::Solved, "{:?}", r.detail);
    assert_eq!(r.worker_runs(), 2);
    assert_eq!(r.compile_attempts(), 3);
    assert_eq!(r.strategy, "tsr");
}

#[test]
fn tsr_reports_last_outcome_when_out_of_heuristics() {
    let dir = counters_schedule(&["counters_panic.rs"; 3]);
    let policy = BudgetPolicy { max_heuristics: 2, ..budget(120.0, 5.0) };
    let r = synth(dir.path(), "counters_n3.json", PromptOptions::default(), |s| run_tsr(s, &policy).unwrap());
    assert_eq!(r.worker_runs(), 2);
    assert_eq!(r.outcome, RunOutcome::HeuristicError);
    assert!(r.detail.unwrap().contains("no estimate"));
}

#[test]
fn refine_phase_reads_refined_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let good = snippet("counters_good.rs");
    for phase in ["strategize", "unrefined"] {
        let d = dir.path().join("counters").join(phase);
        std::fs::create_dir_all(&d).unwrap();
        std::fs::write(d.join("1.md"), "```rust\nthis is not rust\n```").unwrap();
    }
    let d = dir.path().join("counters/refined");
    std::fs::create_dir_all(&d).unwrap();
    std::fs::write(d.join("1.md"), format!("```rust\n{good}\n```")).unwrap();
    let options = PromptOptions { strategize: true, refine: true };
    let r = synth(dir.path(), "counters_n3.json", options, |s| run_fc(s, &budget(120.0, 100.0)).unwrap());
    assert_eq!(r.outcome, RunOutcome::Solved);
    assert_eq!(r.attempts[0].transcripts.len(), 3);
}

#[test]
fn offline_runs_are_reproducible() {
    let dir = counters_schedule(&["counters_broken.rs", "counters_good.rs"]);
    let run = || synth(dir.path(), "counters_n3.json", PromptOptions::default(), |s| run_tsr(s, &budget(120.0, 10.0)).unwrap());
    let strip = |mut r: RunRecord| {
        r.api_seconds = 0.0;
        r.compile_seconds = 0.0;
        r.search_seconds = 0.0;
        r.wall_seconds = 0.0;
        for a in &mut r.attempts {
            a.api_seconds = 0.0;
            a.compile_seconds = 0.0;
            a.search_seconds = 0.0;
            if let Some(res) = &mut a.result {
                res.stats.elapsed_seconds = 0.0;
            }
        }
        r
    };
    let (a, b) = (strip(run()), strip(run()));
    assert_eq!(a, b);
    assert_eq!(a.to_json(), b.to_json());
}

#[test]
fn budget_is_checked_before_running() {
    let dir = counters_schedule(&["counters_good.rs"]);
    let model = load("counters_n3.json");
    let llm = LlmConfig::offline(dir.path()).unwrap();
    let setup = SynthSetup::new(&model, &instance("counters_n3.json"), &llm, PromptOptions::default(), compiler());
    assert!(matches!(run_tsr(&setup, &budget(10.0, 20.0)), Err(SetupError::Budget(_))));
    let zero = BudgetPolicy { max_heuristics: 0, ..budget(10.0, 5.0) };
    assert!(matches!(run_fc(&setup, &zero), Err(SetupError::Budget(_))));
}

#[test]
fn record_round_trips_through_json() {
    let model = load("counters_n3.json");
    let r = run_builtin(&model, "counters_n3", &HeuristicSpec::Hmd, Algorithm::Gbfs, &Limits::new(10.0, GIB)).unwrap();
    assert_eq!(r.configuration, "gbfs-hmd");
    assert!(r.solved());
    let back: RunRecord = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(back, r);
}

fn record(domain: &str, config: &str, solved: bool, tokens: &[(u64, u64)], compiles: &[bool]) -> RunRecord {
    use heursynth::orchestrator::AttemptRecord;
    use heursynth::{CompileStatus, Phase, TranscriptRecord};
    let mut r = RunRecord::new("i", domain, config, "tsr");
    r.outcome = if solved { RunOutcome::Solved } else { RunOutcome::BudgetExhausted };
    for (i, &(inp, out)) in tokens.iter().enumerate() {
        r.input_tokens += inp;
        r.output_tokens += out;
        r.attempts.push(AttemptRecord {
            index: i as u32 + 1,
            phase: Phase::Unrefined,
            transcripts: vec![TranscriptRecord {
                input_tokens: inp,
                output_tokens: out,
                latency_seconds: 0.0,
                model_id: "m".into(),
                phase: Phase::Unrefined,
                timestamp: 0.0,
                usage_missing: false,
            }],
            llm_error: None,
            source: None,
            compile: compiles.get(i).map(|&ok| if ok { CompileStatus::Ok("w".into()) } else { CompileStatus::Failed("e".into()) }),
            result: None,
            api_seconds: 1.0,
            compile_seconds: 2.0,
            search_seconds: 3.0,
        });
    }
    r.api_seconds = tokens.len() as f64;
    r
}

#[test]
fn report_rows() {
    let records = vec![
        record("counters", "tsr", true, &[(1000, 100), (3000, 300)], &[false, true]),
        record("counters", "tsr", true, &[(2000, 200)], &[true]),
        record("counters", "tsr", false, &[], &[]),
        record("pacman", "tsr", false, &[(10, 1)], &[false]),
    ];
    let rows = summarize(&records);
    assert_eq!(rows.len(), 2);
    let c = &rows[0];
    assert_eq!((c.domain.as_str(), c.solved, c.attempted), ("counters", 2, 3));
    assert_eq!(c.mean_input_tokens, 2000.0);
    assert_eq!(c.mean_output_tokens, 200.0);
    assert_eq!(c.compile_failure_rate, 1.0 / 3.0);
    assert_eq!(c.mean_api_seconds, 1.0);
    assert_eq!(rows[1].compile_failure_rate, 1.0);

    let mut csv = Vec::new();
    heursynth::report::write_csv(&records, &mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("domain,configuration,solved,attempted,"));
    assert_eq!(text.lines().count(), 3);

    let out = tempfile::tempdir().unwrap();
    assert!(matches!(heursynth::report(&[], &out.path().join("r.csv")), Err(ReportError::EmptyReport)));
}
