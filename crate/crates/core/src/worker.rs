//! Entry point for compiled heuristic workers.
//!
//! A worker binary is a generated `main` that calls [`run`] with a
//! domain-specific heuristic. It loads the instance, searches under the given
//! limits and prints the result JSON on stdout.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use clap::Parser;

use crate::model::{Domain, InstanceDoc};
use crate::search::{self, Algorithm, Limits};

#[derive(Debug, Parser)]
#[command(about = "Heuristic search worker")]
pub struct WorkerArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value = "gbfs")]
    pub algorithm: Algorithm,
    /// Seconds.
    #[arg(long, default_value_t = 600.0)]
    pub time_limit: f64,
    /// Bytes.
    #[arg(long, default_value_t = 8 * search::GIB)]
    pub memory_limit: u64,
    #[arg(long)]
    pub max_expansions: Option<u64>,
}

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        format!("heuristic panicked: {s}")
    } else if let Some(s) = payload.downcast_ref::<String>() {
        format!("heuristic panicked: {s}")
    } else {
        "heuristic panicked".into()
    }
}

/// Runs the worker with `heuristic` and exits the process.
pub fn run<D>(heuristic: fn(&D, &D::State) -> f64) -> !
where
    D: Domain + 'static,
{
    let args = WorkerArgs::parse();
    std::process::exit(execute::<D>(&args, heuristic))
}

/// Worker body; returns the process exit code.
pub fn execute<D>(args: &WorkerArgs, heuristic: fn(&D, &D::State) -> f64) -> i32
where
    D: Domain + 'static,
{
    let text = match std::fs::read_to_string(&args.instance) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {e}", args.instance.display());
            return 3;
        }
    };
    let doc = match InstanceDoc::parse_str(&text) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("{e}");
            return 3;
        }
    };
    if doc.domain != D::NAME {
        eprintln!("worker was built for `{}`, instance is `{}`", D::NAME, doc.domain);
        return 2;
    }
    let task = match D::load(&doc) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{e}");
            return 3;
        }
    };
    let limits = Limits {
        wall_clock_seconds: args.time_limit,
        memory_bytes: args.memory_limit,
        max_expansions: args.max_expansions,
    };
    let result = match args.algorithm {
        Algorithm::Bfs => search::bfs(&task, &limits),
        Algorithm::Gbfs => {
            let h = |s: &D::State| catch_unwind(AssertUnwindSafe(|| heuristic(&task, s))).map_err(panic_message);
            search::gbfs(&task, h, &limits)
        }
    };
    println!("{}", result.to_json());
    0
}
