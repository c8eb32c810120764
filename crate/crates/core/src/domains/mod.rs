//! Built-in executable domains.

pub mod counters;
pub mod fo_counters;
pub mod pacman;
mod primes;
pub mod twinprime;

pub use counters::{Counters, CountersState};
pub use fo_counters::{FoCounters, FoCountersState};
pub use pacman::{Dir, Ghost, Pacman, PacmanState};
pub use primes::{is_prime, is_twin_prime, next_twin_prime_above};
pub use twinprime::{TwinPrime, TwinPrimeState};

use crate::model::{Domain, DomainRegistry, Fluents, GoalCondition, PlanningTask};

/// A loaded task of any built-in domain.
#[derive(Debug, Clone)]
pub enum TaskModel {
    Counters(Counters),
    FoCounters(FoCounters),
    Pacman(Pacman),
    TwinPrime(TwinPrime),
}

/// Runs `$body` with `$task` bound to the concrete task inside a [`TaskModel`].
#[macro_export]
macro_rules! with_task {
    ($model:expr, $task:ident => $body:expr) => {
        match $model {
            $crate::domains::TaskModel::Counters($task) => $body,
            $crate::domains::TaskModel::FoCounters($task) => $body,
            $crate::domains::TaskModel::Pacman($task) => $body,
            $crate::domains::TaskModel::TwinPrime($task) => $body,
        }
    };
}

impl TaskModel {
    pub fn domain_name(&self) -> &'static str {
        with_task!(self, t => t.domain_name())
    }

    pub fn goal(&self) -> &[GoalCondition] {
        with_task!(self, t => t.goal())
    }

    pub fn variables(&self) -> Vec<String> {
        with_task!(self, t => t.variables())
    }

    pub fn initial_fluents(&self) -> Fluents {
        with_task!(self, t => t.fluents(&t.initial_state()))
    }

    pub fn initial_state_json(&self) -> serde_json::Value {
        with_task!(self, t => serde_json::to_value(t.initial_state()).expect("states serialize"))
    }

    pub fn info(&self) -> &'static DomainInfo {
        domain_info(self.domain_name()).expect("built-in domains have info")
    }
}

pub(crate) fn builtin_registry() -> DomainRegistry {
    let mut r = DomainRegistry::empty();
    r.register(Counters::NAME, |d| Counters::load(d).map(TaskModel::Counters));
    r.register(FoCounters::NAME, |d| FoCounters::load(d).map(TaskModel::FoCounters));
    r.register(Pacman::NAME, |d| Pacman::load(d).map(TaskModel::Pacman));
    r.register(TwinPrime::NAME, |d| TwinPrime::load(d).map(TaskModel::TwinPrime));
    r
}

/// What a synthesized heuristic needs to know about a domain: where its
/// types live, the exact function signature, and the domain source.
#[derive(Debug, Clone, Copy)]
pub struct DomainInfo {
    pub name: &'static str,
    /// Module path under `heursynth_core::domains`.
    pub module: &'static str,
    pub task_type: &'static str,
    pub state_type: &'static str,
    pub source: &'static str,
}

impl DomainInfo {
    pub fn heuristic_signature(&self) -> String {
        format!(
            "pub fn heuristic(task: &{}, state: &{}) -> f64",
            self.task_type, self.state_type
        )
    }
}

pub const DOMAINS: [DomainInfo; 4] = [
    DomainInfo {
        name: Counters::NAME,
        module: "counters",
        task_type: "Counters",
        state_type: "CountersState",
        source: include_str!("counters.rs"),
    },
    DomainInfo {
        name: FoCounters::NAME,
        module: "fo_counters",
        task_type: "FoCounters",
        state_type: "FoCountersState",
        source: include_str!("fo_counters.rs"),
    },
    DomainInfo {
        name: Pacman::NAME,
        module: "pacman",
        task_type: "Pacman",
        state_type: "PacmanState",
        source: include_str!("pacman.rs"),
    },
    DomainInfo {
        name: TwinPrime::NAME,
        module: "twinprime",
        task_type: "TwinPrime",
        state_type: "TwinPrimeState",
        source: include_str!("twinprime.rs"),
    },
];

pub fn domain_info(name: &str) -> Option<&'static DomainInfo> {
    DOMAINS.iter().find(|d| d.name == name)
}

impl TaskModel {
    /// Runs an in-process search with a built-in heuristic. BFS ignores the
    /// heuristic.
    pub fn search(
        &self,
        algorithm: crate::search::Algorithm,
        heuristic: &crate::heuristics::HeuristicSpec,
        limits: &crate::search::Limits,
    ) -> crate::Result<crate::search::SearchResult> {
        use crate::heuristics::{h_blind, hmd_for, HeuristicSpec};
        use crate::search::{bfs, gbfs, Algorithm};
        with_task!(self, t => match (algorithm, heuristic) {
            (_, HeuristicSpec::Plugin(p)) => Err(crate::ModelError::schema(
                "heuristic",
                format!("plugin heuristics run in a worker process ({})", p.display()),
            )),
            (Algorithm::Bfs, _) => Ok(bfs(t, limits)),
            (Algorithm::Gbfs, HeuristicSpec::Blind) => Ok(gbfs(t, |s| Ok(h_blind(s)), limits)),
            (Algorithm::Gbfs, HeuristicSpec::Hmd) => Ok(gbfs(t, hmd_for(t)?, limits)),
        })
    }

    pub fn validate<L: AsRef<str>>(&self, plan: &[L]) -> crate::validator::ValidationReport {
        with_task!(self, t => crate::validator::validate(t, plan))
    }

    /// h^md of the initial state.
    pub fn initial_hmd(&self) -> crate::Result<f64> {
        crate::heuristics::h_md(&self.initial_fluents(), self.goal())
    }
}
