//! Plan verification by replay.
//!
//! Independent of the search code: each action label must name one of the
//! transitions the successor generator offers in the current state, and the
//! final state must pass the goal test.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::model::PlanningTask;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Valid,
    InvalidStep { index: usize, reason: String },
    GoalUnsatisfied,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub verdict: Verdict,
    /// Hash of every state visited, starting with the initial state.
    pub trace: Vec<u64>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.verdict == Verdict::Valid
    }
}

/// Deterministic state hash used for traces.
pub fn state_hash<S: Hash>(state: &S) -> u64 {
    let mut h = DefaultHasher::new();
    state.hash(&mut h);
    h.finish()
}

pub fn validate<T: PlanningTask, L: AsRef<str>>(task: &T, plan: &[L]) -> ValidationReport {
    let mut state = task.initial_state();
    let mut trace = vec![state_hash(&state)];
    for (index, label) in plan.iter().enumerate() {
        let label = label.as_ref();
        let next = task
            .successors(&state)
            .into_iter()
            .find(|t| t.label() == label)
            .map(|t| t.successor);
        match next {
            Some(s) => {
                state = s;
                trace.push(state_hash(&state));
            }
            None => {
                return ValidationReport {
                    verdict: Verdict::InvalidStep {
                        index,
                        reason: "action not applicable".into(),
                    },
                    trace,
                }
            }
        }
    }
    let verdict = if task.is_goal(&state) {
        Verdict::Valid
    } else {
        Verdict::GoalUnsatisfied
    };
    ValidationReport { verdict, trace }
}
