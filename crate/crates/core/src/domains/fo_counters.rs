//! FO-Counters: counters that move by a per-counter rate. Rates can be
//! raised or lowered by one within `[0, max_rate]`; values move by the
//! current rate within `[0, max_value]`. Same chain goal as Counters.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::counters::{chain_goal, chain_holds};
use crate::error::{ModelError, Result};
use crate::model::{Domain, Fluents, GoalCondition, GoalSpec, InstanceDoc, PlanningTask, Transition, Value};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FoCountersState {
    pub values: Vec<i64>,
    pub rates: Vec<i64>,
}

#[derive(Debug, Clone)]
pub struct FoCounters {
    pub n: usize,
    pub max_value: i64,
    pub max_rate: i64,
    pub initial: FoCountersState,
    goal: Vec<GoalCondition>,
    custom_goal: bool,
    labels: Vec<[Arc<str>; 4]>,
}

impl FoCounters {
    pub fn new(max_value: i64, max_rate: i64, values: Vec<i64>, rates: Vec<i64>) -> Result<Self> {
        if values.len() != rates.len() {
            return Err(ModelError::schema("parameters.rates", "length differs from values"));
        }
        if max_value < 0 || max_rate < 0 {
            return Err(ModelError::schema("parameters", "bounds must be nonnegative"));
        }
        if let Some(i) = values.iter().position(|v| !(0..=max_value).contains(v)) {
            return Err(ModelError::schema(format!("parameters.values[{i}]"), "outside [0, max_value]"));
        }
        if let Some(i) = rates.iter().position(|r| !(0..=max_rate).contains(r)) {
            return Err(ModelError::schema(format!("parameters.rates[{i}]"), "outside [0, max_rate]"));
        }
        let n = values.len();
        Ok(FoCounters {
            n,
            max_value,
            max_rate,
            initial: FoCountersState { values, rates },
            goal: chain_goal(n, "c"),
            custom_goal: false,
            labels: (0..n)
                .map(|i| ["increase_value", "decrease_value", "increase_rate", "decrease_rate"].map(|a| format!("{a} c{i}").into()))
                .collect(),
        })
    }
}

impl PlanningTask for FoCounters {
    type State = FoCountersState;

    fn domain_name(&self) -> &'static str {
        Self::NAME
    }

    fn initial_state(&self) -> FoCountersState {
        self.initial.clone()
    }

    fn successors(&self, state: &FoCountersState) -> Vec<Transition<FoCountersState>> {
        let mut out = Vec::with_capacity(4 * self.n);
        for i in 0..self.n {
            let (v, r) = (state.values[i], state.rates[i]);
            // a zero rate would be a no-op move
            if r > 0 && v + r <= self.max_value {
                let mut next = state.clone();
                next.values[i] = v + r;
                out.push(Transition::new(self.labels[i][0].clone(), next));
            }
            if r > 0 && v - r >= 0 {
                let mut next = state.clone();
                next.values[i] = v - r;
                out.push(Transition::new(self.labels[i][1].clone(), next));
            }
            if r < self.max_rate {
                let mut next = state.clone();
                next.rates[i] = r + 1;
                out.push(Transition::new(self.labels[i][2].clone(), next));
            }
            if r > 0 {
                let mut next = state.clone();
                next.rates[i] = r - 1;
                out.push(Transition::new(self.labels[i][3].clone(), next));
            }
        }
        out
    }

    fn is_goal(&self, state: &FoCountersState) -> bool {
        if self.custom_goal {
            let fluents = self.fluents(state);
            self.goal.iter().all(|c| c.check(&fluents).unwrap_or(false))
        } else {
            chain_holds(&state.values)
        }
    }

    fn fluents(&self, state: &FoCountersState) -> Fluents {
        let values = state.values.iter().enumerate().map(|(i, v)| (format!("c{i}"), Value::Int(*v)));
        let rates = state.rates.iter().enumerate().map(|(i, r)| (format!("rate{i}"), Value::Int(*r)));
        values.chain(rates).collect()
    }

    fn variables(&self) -> Vec<String> {
        (0..self.n)
            .map(|i| format!("c{i}"))
            .chain((0..self.n).map(|i| format!("rate{i}")))
            .collect()
    }

    fn write_fluent_values(&self, state: &FoCountersState, out: &mut Vec<Value>) {
        out.clear();
        out.extend(state.values.iter().chain(&state.rates).map(|v| Value::Int(*v)));
    }

    fn goal(&self) -> &[GoalCondition] {
        &self.goal
    }
}

impl Domain for FoCounters {
    const NAME: &'static str = "fo-counters";

    fn load(doc: &InstanceDoc) -> Result<Self> {
        let max_value = match doc.param_i64("max_value")? {
            Some(m) => m,
            None => doc
                .param_i64("max")?
                .ok_or_else(|| ModelError::schema("parameters.max_value", "missing"))?,
        };
        let max_rate = doc
            .param_i64("max_rate")?
            .ok_or_else(|| ModelError::schema("parameters.max_rate", "missing"))?;
        let declared_n = doc.param_u64("n")?.map(|n| n as usize);
        let values = match doc.param_i64_array("values")? {
            Some(v) => v,
            None => {
                let n = declared_n.ok_or_else(|| ModelError::schema("parameters.n", "missing"))?;
                doc.indexed_initial("c", n)?.unwrap_or_else(|| vec![0; n])
            }
        };
        let n = declared_n.unwrap_or(values.len());
        if n != values.len() {
            return Err(ModelError::schema("parameters.values", "length differs from n"));
        }
        let rates = match doc.param_i64_array("rates")? {
            Some(r) => r,
            None => doc.indexed_initial("rate", n)?.unwrap_or_else(|| vec![0; n]),
        };
        let mut task = FoCounters::new(max_value, max_rate, values, rates)?;
        let default_goal = task.goal.clone();
        task.goal = doc.resolve_goal(&task.variables(), default_goal)?;
        task.custom_goal = matches!(doc.goal, GoalSpec::Conditions(_));
        Ok(task)
    }
}
