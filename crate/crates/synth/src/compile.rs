//! Turning heuristic source into a worker executable.
//!
//! The template project is copied into a per-source work directory and built
//! with `cargo build --release` against a target directory shared by all
//! workers, so the planner crate and its dependencies are compiled once.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::io;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use heursynth_core::domains::DomainInfo;
use serde::{Deserialize, Serialize};

use crate::sandbox::run_limited;

pub const COMPILE_TIMEOUT: Duration = Duration::from_secs(120);
pub const ENV_WORK_DIR: &str = "HEURSYNTH_WORK_DIR";

#[derive(Debug, thiserror::Error)]
pub enum CompileError {
    #[error("cargo toolchain not found at `{0}`")]
    ToolchainMissing(String),
    #[error("template: {0}")]
    Template(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompileStatus {
    Ok(PathBuf),
    Failed(String),
}

impl CompileStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, CompileStatus::Ok(_))
    }

    pub fn worker(&self) -> Option<&Path> {
        match self {
            CompileStatus::Ok(p) => Some(p),
            CompileStatus::Failed(_) => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Compiler {
    pub template_dir: PathBuf,
    pub core_path: PathBuf,
    /// Holds `src-*` work directories, the shared `target` and `bin`.
    pub work_root: PathBuf,
    pub cargo: PathBuf,
    pub timeout: Duration,
    /// Copied into each work directory to pin dependency versions.
    pub lockfile: Option<PathBuf>,
    /// Workers built by this compiler (and its clones), by source key.
    built: Arc<Mutex<HashMap<String, PathBuf>>>,
}

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn default_template_dir() -> PathBuf {
    manifest_dir().join("template")
}

impl Default for Compiler {
    fn default() -> Self {
        Compiler::with_template(default_template_dir())
    }
}

impl Compiler {
    pub fn with_template(template_dir: impl Into<PathBuf>) -> Self {
        let root = manifest_dir().join("../..");
        let work_root = std::env::var_os(ENV_WORK_DIR)
            .map(PathBuf::from)
            .unwrap_or_else(|| root.join("target/heursynth-workers"));
        let cargo = std::env::var_os("CARGO")
            .map(PathBuf::from)
            .or_else(|| option_env!("CARGO").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("cargo"));
        let lock = root.join("Cargo.lock");
        Compiler {
            template_dir: template_dir.into(),
            core_path: manifest_dir().join("../core"),
            work_root,
            cargo,
            timeout: COMPILE_TIMEOUT,
            lockfile: lock.is_file().then_some(lock),
            built: Arc::default(),
        }
    }

    pub fn target_dir(&self) -> PathBuf {
        self.work_root.join("target")
    }

    fn key(source: &str, domain: &DomainInfo) -> String {
        let mut h = DefaultHasher::new();
        domain.name.hash(&mut h);
        source.hash(&mut h);
        format!("{:016x}", h.finish())
    }

    fn render(&self, text: &str, package: &str, source: &str, domain: &DomainInfo) -> io::Result<String> {
        let core = std::fs::canonicalize(&self.core_path)?;
        Ok(text
            .replace("{{PACKAGE}}", package)
            .replace("{{CORE_PATH}}", &core.to_string_lossy())
            .replace("{{MODULE}}", domain.module)
            .replace("{{TASK_TYPE}}", domain.task_type)
            .replace("{{SOURCE}}", source))
    }

    fn prepare(&self, source: &str, domain: &DomainInfo, key: &str) -> io::Result<PathBuf> {
        let package = format!("worker-{key}");
        let dir = self.work_root.join(format!("src-{key}"));
        std::fs::create_dir_all(dir.join("src"))?;
        let manifest = std::fs::read_to_string(self.template_dir.join("Cargo.toml.tmpl"))?;
        std::fs::write(dir.join("Cargo.toml"), self.render(&manifest, &package, source, domain)?)?;
        for f in ["main.rs", "heuristic.rs"] {
            let text = std::fs::read_to_string(self.template_dir.join("src").join(f))?;
            std::fs::write(dir.join("src").join(f), self.render(&text, &package, source, domain)?)?;
        }
        if let Some(lock) = &self.lockfile {
            std::fs::copy(lock, dir.join("Cargo.lock"))?;
        }
        Ok(dir)
    }

    /// Builds a worker for `domain` around `source`. `budget` caps the build
    /// below [`Compiler::timeout`] when less time is left.
    pub fn compile(&self, source: &str, domain: &DomainInfo, budget: Option<Duration>) -> Result<CompileStatus, CompileError> {
        let key = Self::key(source, domain);
        if let Some(w) = self.built.lock().expect("worker cache").get(&key) {
            if w.is_file() {
                return Ok(CompileStatus::Ok(w.clone()));
            }
        }
        let dir = self.prepare(source, domain, &key)?;
        let mut cmd = Command::new(&self.cargo);
        cmd.arg("build")
            .arg("--release")
            .arg("--color")
            .arg("never")
            .arg("--manifest-path")
            .arg(dir.join("Cargo.toml"))
            .arg("--target-dir")
            .arg(self.target_dir())
            .env_remove("CARGO_TARGET_DIR")
            .env_remove("RUSTFLAGS")
            .env_remove("CARGO_ENCODED_RUSTFLAGS");
        let wall = budget.map_or(self.timeout, |b| b.min(self.timeout));
        let out = match run_limited(cmd, wall, None) {
            Ok(o) => o,
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                return Err(CompileError::ToolchainMissing(self.cargo.display().to_string()))
            }
            Err(e) => return Err(e.into()),
        };
        match out.status {
            None => Ok(CompileStatus::Failed(format!("compilation timed out after {:.1} s\n{}", wall.as_secs_f64(), out.stderr))),
            Some(s) if !s.success() => Ok(CompileStatus::Failed(out.stderr)),
            Some(_) => {
                let built = self.target_dir().join("release").join(format!("worker-{key}"));
                let bin_dir = self.work_root.join("bin");
                std::fs::create_dir_all(&bin_dir)?;
                let dest = bin_dir.join(format!("worker-{key}"));
                // copy to a temp name first so concurrent builds never see a partial file
                let tmp = bin_dir.join(format!(".worker-{key}.{}", std::process::id()));
                std::fs::copy(&built, &tmp)?;
                std::fs::rename(&tmp, &dest)?;
                self.built.lock().expect("worker cache").insert(key, dest.clone());
                Ok(CompileStatus::Ok(dest))
            }
        }
    }

    /// Builds a trivial worker so later compiles only build their own crate.
    pub fn warm_up(&self) -> Result<Duration, CompileError> {
        let start = Instant::now();
        let d = heursynth_core::domains::domain_info("counters").expect("counters is built in");
        let src = format!("{} {{ 0.0 }}", d.heuristic_signature());
        match self.compile(&src, d, None)? {
            CompileStatus::Ok(_) => Ok(start.elapsed()),
            CompileStatus::Failed(diag) => Err(CompileError::Template(io::Error::other(diag))),
        }
    }
}

/// Compiles with the default work directory and toolchain.
pub fn compile_heuristic(source: &str, template_dir: &Path, domain: &DomainInfo) -> Result<CompileStatus, CompileError> {
    Compiler::with_template(template_dir).compile(source, domain, None)
}
