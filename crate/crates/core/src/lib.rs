//! Executable planning tasks and the search machinery around them.
//!
//! A task is a Rust value implementing [`model::PlanningTask`]: an initial
//! state, a successor generator and a goal test, plus the declarative goal
//! list that h^md reads. [`search`] runs budgeted BFS and greedy best-first
//! search over any task, [`validator`] replays plans, and [`worker`] is the
//! runtime that compiled heuristic workers link against.

pub mod domains;
pub mod error;
pub mod heuristics;
pub mod model;
pub mod search;
pub mod validator;
pub mod worker;

pub use domains::TaskModel;
pub use error::{ModelError, Result};
pub use heuristics::HeuristicSpec;
pub use model::{load_instance, load_instance_file, load_instance_str, DomainRegistry, InstanceDoc, PlanningTask};
pub use search::{bfs, gbfs, Algorithm, Limits, Outcome, SearchResult, SearchStats};
pub use validator::{validate, ValidationReport, Verdict};
