#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use heursynth::Compiler;
use heursynth_core::TaskModel;

pub fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn instance(name: &str) -> PathBuf {
    root().join("fixtures/instances").join(name)
}

pub fn load(name: &str) -> TaskModel {
    heursynth_core::load_instance_file(&instance(name)).unwrap()
}

pub fn snippet(name: &str) -> String {
    std::fs::read_to_string(root().join("fixtures/snippets").join(name)).unwrap()
}

/// Shared compiler with the core crate already built into its target dir.
pub fn compiler() -> &'static Compiler {
    static C: OnceLock<Compiler> = OnceLock::new();
    C.get_or_init(|| {
        let c = Compiler::default();
        c.warm_up().expect("worker template builds");
        c
    })
}

/// One scripted model reply per attempt: strategy text, then the code.
pub struct Reply<'a> {
    pub code: &'a str,
    /// (input, output) tokens for the strategize and code phases.
    pub usage: Option<[(u64, u64); 2]>,
}

pub fn reply(code: &str) -> Reply<'_> {
    Reply { code, usage: None }
}

fn write_phase(dir: &Path, domain: &str, phase: &str, attempt: usize, text: &str, usage: Option<(u64, u64)>) {
    let d = dir.join(domain).join(phase);
    std::fs::create_dir_all(&d).unwrap();
    std::fs::write(d.join(format!("{attempt}.md")), text).unwrap();
    if let Some((i, o)) = usage {
        let sidecar = format!("{{\"input_tokens\": {i}, \"output_tokens\": {o}}}");
        std::fs::write(d.join(format!("{attempt}.usage.json")), sidecar).unwrap();
    }
}

/// Writes an offline schedule for the default two-phase conversation.
pub fn schedule(dir: &Path, domain: &str, replies: &[Reply]) {
    for (i, r) in replies.iter().enumerate() {
        let n = i + 1;
        write_phase(dir, domain, "strategize", n, "Measure how far each counter is from its successor.\n", r.usage.map(|u| u[0]));
        let text = format!("Here is the heuristic.\n\n```rust\n{}\n```\n", r.code);
        write_phase(dir, domain, "unrefined", n, &text, r.usage.map(|u| u[1]));
    }
}
