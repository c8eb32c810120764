//! Counters: `n` integer counters in `[0, max_value]`, each can be
//! incremented or decremented by one. The goal orders them strictly:
//! `c[i] + 1 <= c[i+1]` for every adjacent pair.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::model::{Cmp, Domain, Expr, Fluents, GoalCondition, GoalSpec, InstanceDoc, PlanningTask, Transition, Value};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CountersState {
    pub values: Vec<i64>,
}

#[derive(Debug, Clone)]
pub struct Counters {
    pub n: usize,
    pub max_value: i64,
    pub initial: CountersState,
    goal: Vec<GoalCondition>,
    custom_goal: bool,
    /// `["inc c{i}", "dec c{i}"]` per counter.
    labels: Vec<[Arc<str>; 2]>,
}

impl Counters {
    pub fn new(max_value: i64, values: Vec<i64>) -> Result<Self> {
        let n = values.len();
        if max_value < 0 {
            return Err(ModelError::schema("parameters.max_value", "must be nonnegative"));
        }
        if let Some(i) = values.iter().position(|v| !(0..=max_value).contains(v)) {
            return Err(ModelError::schema(format!("parameters.values[{i}]"), "outside [0, max_value]"));
        }
        Ok(Counters {
            n,
            max_value,
            initial: CountersState { values },
            goal: chain_goal(n, "c"),
            custom_goal: false,
            labels: (0..n).map(|i| [format!("inc c{i}").into(), format!("dec c{i}").into()]).collect(),
        })
    }
}

/// `c[i] + 1 <= c[i+1]` for all adjacent pairs, normalized to `psi <= 0`.
pub fn chain_goal(n: usize, prefix: &str) -> Vec<GoalCondition> {
    (0..n.saturating_sub(1))
        .map(|i| {
            GoalCondition::relation(
                Expr::add(Expr::var(format!("{prefix}{i}")), Expr::Const(1.0)),
                Cmp::Le,
                Expr::var(format!("{prefix}{}", i + 1)),
            )
        })
        .collect()
}

pub(crate) fn chain_holds(values: &[i64]) -> bool {
    values.windows(2).all(|w| w[0] + 1 <= w[1])
}

impl PlanningTask for Counters {
    type State = CountersState;

    fn domain_name(&self) -> &'static str {
        Self::NAME
    }

    fn initial_state(&self) -> CountersState {
        self.initial.clone()
    }

    fn successors(&self, state: &CountersState) -> Vec<Transition<CountersState>> {
        let mut out = Vec::with_capacity(2 * self.n);
        for (i, &v) in state.values.iter().enumerate() {
            if v < self.max_value {
                let mut next = state.clone();
                next.values[i] += 1;
                out.push(Transition::new(self.labels[i][0].clone(), next));
            }
            if v > 0 {
                let mut next = state.clone();
                next.values[i] -= 1;
                out.push(Transition::new(self.labels[i][1].clone(), next));
            }
        }
        out
    }

    fn is_goal(&self, state: &CountersState) -> bool {
        if self.custom_goal {
            let fluents = self.fluents(state);
            self.goal.iter().all(|c| c.check(&fluents).unwrap_or(false))
        } else {
            chain_holds(&state.values)
        }
    }

    fn fluents(&self, state: &CountersState) -> Fluents {
        state
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| (format!("c{i}"), Value::Int(*v)))
            .collect()
    }

    fn variables(&self) -> Vec<String> {
        (0..self.n).map(|i| format!("c{i}")).collect()
    }

    fn write_fluent_values(&self, state: &CountersState, out: &mut Vec<Value>) {
        out.clear();
        out.extend(state.values.iter().map(|v| Value::Int(*v)));
    }

    fn goal(&self) -> &[GoalCondition] {
        &self.goal
    }
}

impl Domain for Counters {
    const NAME: &'static str = "counters";

    fn load(doc: &InstanceDoc) -> Result<Self> {
        let max_value = match doc.param_i64("max_value")? {
            Some(m) => m,
            None => doc
                .param_i64("max")?
                .ok_or_else(|| ModelError::schema("parameters.max_value", "missing"))?,
        };
        let declared_n = doc.param_u64("n")?.map(|n| n as usize);
        let values = match doc.param_i64_array("values")? {
            Some(v) => v,
            None => {
                let n = declared_n.ok_or_else(|| ModelError::schema("parameters.n", "missing"))?;
                doc.indexed_initial("c", n)?.unwrap_or_else(|| vec![0; n])
            }
        };
        if declared_n.is_some_and(|n| n != values.len()) {
            return Err(ModelError::schema("parameters.values", "length differs from n"));
        }
        let mut task = Counters::new(max_value, values)?;
        let default_goal = task.goal.clone();
        task.goal = doc.resolve_goal(&task.variables(), default_goal)?;
        task.custom_goal = matches!(doc.goal, GoalSpec::Conditions(_));
        Ok(task)
    }
}
