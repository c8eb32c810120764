//! Running untrusted children under wall-clock and address-space caps.

use std::io::{self, Read};
use std::os::unix::process::{CommandExt, ExitStatusExt};
use std::path::Path;
use std::process::{Command, ExitStatus, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use heursynth_core::search::{Algorithm, Limits, Outcome, SearchResult, SearchStats};
use wait_timeout::ChildExt;

/// Extra wall-clock time a worker gets past its slice before it is killed.
pub const KILL_GRACE: Duration = Duration::from_millis(500);

#[derive(Debug)]
pub struct ChildOutput {
    /// `None` when the child was killed on timeout.
    pub status: Option<ExitStatus>,
    pub stdout: String,
    pub stderr: String,
    pub elapsed: Duration,
}

impl ChildOutput {
    pub fn timed_out(&self) -> bool {
        self.status.is_none()
    }
}

fn drain<R: Read + Send + 'static>(r: Option<R>) -> thread::JoinHandle<String> {
    thread::spawn(move || {
        let mut buf = Vec::new();
        if let Some(mut r) = r {
            let _ = r.read_to_end(&mut buf);
        }
        String::from_utf8_lossy(&buf).into_owned()
    })
}

/// Runs `cmd` in its own process group. The whole group is killed once
/// `wall` elapses; `memory` sets `RLIMIT_AS` for the child.
pub fn run_limited(mut cmd: Command, wall: Duration, memory: Option<u64>) -> io::Result<ChildOutput> {
    cmd.stdin(Stdio::null()).stdout(Stdio::piped()).stderr(Stdio::piped());
    // SAFETY: only async-signal-safe libc calls between fork and exec.
    unsafe {
        cmd.pre_exec(move || {
            if libc::setsid() == -1 {
                return Err(io::Error::last_os_error());
            }
            if let Some(bytes) = memory {
                let lim = libc::rlimit { rlim_cur: bytes as libc::rlim_t, rlim_max: bytes as libc::rlim_t };
                if libc::setrlimit(libc::RLIMIT_AS, &lim) != 0 {
                    return Err(io::Error::last_os_error());
                }
            }
            Ok(())
        });
    }
    let start = Instant::now();
    let mut child = cmd.spawn()?;
    let out = drain(child.stdout.take());
    let err = drain(child.stderr.take());
    let status = match child.wait_timeout(wall)? {
        Some(s) => Some(s),
        None => {
            // SAFETY: plain syscall on the group we created
            unsafe {
                libc::killpg(child.id() as libc::pid_t, libc::SIGKILL);
            }
            let _ = child.wait();
            None
        }
    };
    let elapsed = start.elapsed();
    Ok(ChildOutput {
        status,
        stdout: out.join().unwrap_or_default(),
        stderr: err.join().unwrap_or_default(),
        elapsed,
    })
}

fn looks_like_oom(stderr: &str) -> bool {
    stderr.contains("memory allocation of") || stderr.contains("out of memory") || stderr.contains("Cannot allocate memory")
}

fn last_line(s: &str) -> &str {
    s.lines().rev().find(|l| !l.trim().is_empty()).unwrap_or("").trim()
}

/// Runs a compiled worker on `instance` under `slice`. Every failure of the
/// child is folded into the returned outcome.
pub fn run_worker(worker: &Path, instance: &Path, algorithm: Algorithm, slice: &Limits) -> SearchResult {
    let mut cmd = Command::new(worker);
    cmd.arg("--instance")
        .arg(instance)
        .arg("--algorithm")
        .arg(algorithm.to_string())
        .arg("--time-limit")
        .arg(slice.wall_clock_seconds.to_string())
        // leave headroom below the hard cap so the search can report MemoryOut itself
        .arg("--memory-limit")
        .arg((slice.memory_bytes / 10 * 9).to_string());
    if let Some(n) = slice.max_expansions {
        cmd.arg("--max-expansions").arg(n.to_string());
    }
    let wall = Duration::from_secs_f64(slice.wall_clock_seconds.max(0.0)) + KILL_GRACE;
    let failed = |outcome: Outcome, elapsed: Duration| SearchResult {
        outcome,
        stats: SearchStats { elapsed_seconds: elapsed.as_secs_f64(), ..SearchStats::default() },
    };
    let out = match run_limited(cmd, wall, Some(slice.memory_bytes)) {
        Ok(o) => o,
        Err(e) => return failed(Outcome::HeuristicError(format!("cannot start worker: {e}")), Duration::ZERO),
    };
    let Some(status) = out.status else {
        return failed(Outcome::TimedOut, out.elapsed);
    };
    if status.success() {
        if let Ok(r) = SearchResult::from_json(out.stdout.trim()) {
            return r;
        }
    }
    if looks_like_oom(&out.stderr) || status.signal() == Some(libc::SIGKILL) {
        return failed(Outcome::MemoryOut, out.elapsed);
    }
    let how = match (status.code(), status.signal()) {
        (Some(c), _) => format!("exit code {c}"),
        (_, Some(s)) => format!("signal {s}"),
        _ => "unknown status".into(),
    };
    failed(Outcome::HeuristicError(format!("worker crashed ({how}): {}", last_line(&out.stderr))), out.elapsed)
}
