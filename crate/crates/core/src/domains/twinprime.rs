//! Twin Prime: a bank of integer registers. Each action combines two
//! registers with `+ - * /` (integer division, truncating) and stores the
//! result in the first one. The goal is any register holding a twin prime
//! strictly above the threshold.

use serde::{Deserialize, Serialize};

pub use super::primes::{is_prime, is_twin_prime, next_twin_prime_above};
use crate::error::{ModelError, Result};
use crate::model::{Domain, Fluents, GoalCondition, GoalSpec, InstanceDoc, PlanningTask, Transition, Value};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TwinPrimeState {
    pub registers: Vec<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegisterOp {
    Add,
    Sub,
    Mul,
    Idiv,
}

impl RegisterOp {
    pub const ALL: [RegisterOp; 4] = [RegisterOp::Add, RegisterOp::Sub, RegisterOp::Mul, RegisterOp::Idiv];

    pub fn name(self) -> &'static str {
        match self {
            RegisterOp::Add => "add",
            RegisterOp::Sub => "sub",
            RegisterOp::Mul => "mul",
            RegisterOp::Idiv => "idiv",
        }
    }

    /// `None` when the result overflows or the divisor is zero.
    pub fn apply(self, a: i64, b: i64) -> Option<i64> {
        match self {
            RegisterOp::Add => a.checked_add(b),
            RegisterOp::Sub => a.checked_sub(b),
            RegisterOp::Mul => a.checked_mul(b),
            RegisterOp::Idiv => a.checked_div(b),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TwinPrime {
    pub threshold: i64,
    pub initial: TwinPrimeState,
    goal: Vec<GoalCondition>,
    custom_goal: bool,
}

impl TwinPrime {
    pub fn new(registers: Vec<i64>, threshold: i64) -> Result<Self> {
        if registers.len() < 2 {
            return Err(ModelError::schema("parameters.registers", "need at least two registers"));
        }
        Ok(TwinPrime {
            threshold,
            initial: TwinPrimeState { registers },
            goal: vec![GoalCondition::prop("twin_prime_found", true)],
            custom_goal: false,
        })
    }

    pub fn holds_goal_register(&self, value: i64) -> bool {
        value > self.threshold && is_twin_prime(value)
    }
}

impl PlanningTask for TwinPrime {
    type State = TwinPrimeState;

    fn domain_name(&self) -> &'static str {
        Self::NAME
    }

    fn initial_state(&self) -> TwinPrimeState {
        self.initial.clone()
    }

    fn successors(&self, state: &TwinPrimeState) -> Vec<Transition<TwinPrimeState>> {
        let k = state.registers.len();
        let mut out = Vec::with_capacity(4 * k * (k - 1));
        for i in 0..k {
            for j in 0..k {
                if i == j {
                    continue;
                }
                for op in RegisterOp::ALL {
                    if let Some(v) = op.apply(state.registers[i], state.registers[j]) {
                        let mut next = state.clone();
                        next.registers[i] = v;
                        out.push(Transition::new(format!("{} r{i} r{j}", op.name()), next));
                    }
                }
            }
        }
        out
    }

    fn is_goal(&self, state: &TwinPrimeState) -> bool {
        if self.custom_goal {
            let fluents = self.fluents(state);
            self.goal.iter().all(|c| c.check(&fluents).unwrap_or(false))
        } else {
            state.registers.iter().any(|&r| self.holds_goal_register(r))
        }
    }

    fn fluents(&self, state: &TwinPrimeState) -> Fluents {
        let mut f: Fluents = state
            .registers
            .iter()
            .enumerate()
            .map(|(i, r)| (format!("r{i}"), Value::Int(*r)))
            .collect();
        f.insert("threshold".into(), Value::Int(self.threshold));
        f.insert(
            "twin_prime_found".into(),
            Value::Bool(state.registers.iter().any(|&r| self.holds_goal_register(r))),
        );
        f
    }

    fn variables(&self) -> Vec<String> {
        (0..self.initial.registers.len())
            .map(|i| format!("r{i}"))
            .chain(["threshold".to_string(), "twin_prime_found".to_string()])
            .collect()
    }

    fn write_fluent_values(&self, state: &TwinPrimeState, out: &mut Vec<Value>) {
        let found = state.registers.iter().any(|&r| self.holds_goal_register(r));
        out.clear();
        out.extend(state.registers.iter().map(|r| Value::Int(*r)));
        out.push(Value::Int(self.threshold));
        out.push(Value::Bool(found));
    }

    fn goal(&self) -> &[GoalCondition] {
        &self.goal
    }
}

impl Domain for TwinPrime {
    const NAME: &'static str = "twinprime";

    fn load(doc: &InstanceDoc) -> Result<Self> {
        let threshold = doc
            .param_i64("threshold")?
            .ok_or_else(|| ModelError::schema("parameters.threshold", "missing"))?;
        let registers = match doc.param_i64_array("registers")? {
            Some(r) => r,
            None => {
                let n = doc
                    .initial_state
                    .keys()
                    .filter(|k| k.strip_prefix('r').is_some_and(|d| d.parse::<usize>().is_ok()))
                    .count();
                doc.indexed_initial("r", n)?
                    .ok_or_else(|| ModelError::schema("parameters.registers", "missing"))?
            }
        };
        let mut task = TwinPrime::new(registers, threshold)?;
        let default_goal = task.goal.clone();
        task.goal = doc.resolve_goal(&task.variables(), default_goal)?;
        task.custom_goal = matches!(doc.goal, GoalSpec::Conditions(_));
        Ok(task)
    }
}
