//! Built-in heuristics: blind and h^md.
//!
//! h^md sums, over all goal conditions, the distance from the current state
//! to satisfying that condition. A propositional condition contributes 0 or
//! 1. A numeric condition `psi <cmp> 0` contributes the distance from
//! `psi(s)` to the nearest value of `psi` that satisfies the comparator.
//! That distance is taken on the value axis of `psi`, so it is defined for
//! any expression, linear or not.
//!
//! Strict comparators use the same closed form as their non-strict
//! counterparts (the infimum is not attained), so `d` is 0 at `psi(s) = 0`
//! even though `psi > 0` does not hold there. Goal detection never relies on
//! `h = 0`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{ModelError, Result};
use crate::model::{Cmp, Expr, Fluents, GoalCondition, PlanningTask, Value};

/// Heuristic selection for a search run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HeuristicSpec {
    Blind,
    Hmd,
    /// A heuristic that runs inside a separate worker executable. The path
    /// is either heuristic source (`.rs`) or a compiled worker.
    Plugin(PathBuf),
}

impl FromStr for HeuristicSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "blind" => Ok(HeuristicSpec::Blind),
            "hmd" => Ok(HeuristicSpec::Hmd),
            _ => match s.strip_prefix("plugin:") {
                Some(p) if !p.is_empty() => Ok(HeuristicSpec::Plugin(PathBuf::from(p))),
                _ => Err(format!("unknown heuristic `{s}` (expected blind, hmd or plugin:PATH)")),
            },
        }
    }
}

impl fmt::Display for HeuristicSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeuristicSpec::Blind => f.write_str("blind"),
            HeuristicSpec::Hmd => f.write_str("hmd"),
            HeuristicSpec::Plugin(p) => write!(f, "plugin:{}", p.display()),
        }
    }
}

pub fn h_blind<S>(_state: &S) -> f64 {
    0.0
}

/// Distance from `fluents` to satisfying `cond`.
pub fn condition_distance(cond: &GoalCondition, fluents: &Fluents) -> Result<f64> {
    match cond {
        GoalCondition::Prop { .. } => Ok(if cond.check(fluents)? { 0.0 } else { 1.0 }),
        GoalCondition::Numeric { expr, cmp } => {
            let psi = expr.eval(fluents)?;
            Ok(match cmp {
                Cmp::Ge | Cmp::Gt => (-psi).max(0.0),
                Cmp::Le | Cmp::Lt => psi.max(0.0),
                Cmp::Eq => psi.abs(),
            })
        }
    }
}

/// Sum of [`condition_distance`] over `goal`.
pub fn h_md(fluents: &Fluents, goal: &[GoalCondition]) -> Result<f64> {
    goal.iter().map(|c| condition_distance(c, fluents)).sum()
}

enum Node {
    Const(f64),
    Var(usize),
    Unbound(String),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
}

impl Node {
    fn compile(e: &Expr, index: &HashMap<&str, usize>) -> Node {
        let bin = |l: &Expr, r: &Expr| (Box::new(Node::compile(l, index)), Box::new(Node::compile(r, index)));
        match e {
            Expr::Const(c) => Node::Const(*c),
            Expr::Var(v) => index.get(v.as_str()).map_or_else(|| Node::Unbound(v.clone()), |i| Node::Var(*i)),
            Expr::Add(l, r) => {
                let (l, r) = bin(l, r);
                Node::Add(l, r)
            }
            Expr::Sub(l, r) => {
                let (l, r) = bin(l, r);
                Node::Sub(l, r)
            }
            Expr::Mul(l, r) => {
                let (l, r) = bin(l, r);
                Node::Mul(l, r)
            }
            Expr::Div(l, r) => {
                let (l, r) = bin(l, r);
                Node::Div(l, r)
            }
        }
    }

    /// Same arithmetic and error rules as [`Expr::eval`].
    fn eval(&self, values: &[Value]) -> Result<f64> {
        let v = match self {
            Node::Const(c) => *c,
            Node::Var(i) => values[*i].as_real(),
            Node::Unbound(name) => return Err(ModelError::UnboundVariable(name.clone())),
            Node::Add(l, r) => l.eval(values)? + r.eval(values)?,
            Node::Sub(l, r) => l.eval(values)? - r.eval(values)?,
            Node::Mul(l, r) => l.eval(values)? * r.eval(values)?,
            Node::Div(l, r) => {
                let num = l.eval(values)?;
                let den = r.eval(values)?;
                if den == 0.0 {
                    return Err(ModelError::DivisionByZero);
                }
                num / den
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(ModelError::NonFinite)
        }
    }
}

/// `constant + sum(coef * x)` for expressions built from `+`, `-` and
/// products with a constant side. Summing in collected form can differ from
/// [`Expr::eval`] in the last bits when intermediates are not exactly
/// representable; integer-valued fluents and constants give identical results.
struct Linear {
    constant: f64,
    terms: Vec<(usize, f64)>,
}

impl Linear {
    fn of(e: &Expr, index: &HashMap<&str, usize>) -> Option<Linear> {
        match e {
            Expr::Const(c) => Some(Linear { constant: *c, terms: Vec::new() }),
            Expr::Var(v) => index.get(v.as_str()).map(|i| Linear { constant: 0.0, terms: vec![(*i, 1.0)] }),
            Expr::Add(l, r) => Some(Linear::of(l, index)?.plus(Linear::of(r, index)?, 1.0)),
            Expr::Sub(l, r) => Some(Linear::of(l, index)?.plus(Linear::of(r, index)?, -1.0)),
            Expr::Mul(l, r) => {
                let (l, r) = (Linear::of(l, index)?, Linear::of(r, index)?);
                match (l.terms.is_empty(), r.terms.is_empty()) {
                    (true, _) => Some(r.scaled(l.constant)),
                    (_, true) => Some(l.scaled(r.constant)),
                    _ => None,
                }
            }
            Expr::Div(..) => None,
        }
    }

    fn plus(mut self, other: Linear, sign: f64) -> Linear {
        self.constant += sign * other.constant;
        for (i, c) in other.terms {
            match self.terms.iter_mut().find(|t| t.0 == i) {
                Some(t) => t.1 += sign * c,
                None => self.terms.push((i, sign * c)),
            }
        }
        self
    }

    fn scaled(mut self, k: f64) -> Linear {
        self.constant *= k;
        for t in &mut self.terms {
            t.1 *= k;
        }
        self
    }

    fn eval(&self, values: &[Value]) -> Result<f64> {
        let mut acc = self.constant;
        for (i, c) in &self.terms {
            acc += c * values[*i].as_real();
        }
        if acc.is_finite() {
            Ok(acc)
        } else {
            Err(ModelError::NonFinite)
        }
    }
}

enum Psi {
    Linear(Linear),
    Tree(Node),
}

enum Compiled {
    Prop(Node, bool),
    Numeric(Psi, Cmp),
}

/// A goal list resolved against a task's variable order, so h^md can be
/// computed from [`PlanningTask::fluent_values`] without building a map.
pub struct CompiledGoal {
    conds: Vec<Compiled>,
}

impl CompiledGoal {
    pub fn new(goal: &[GoalCondition], variables: &[String]) -> Self {
        let index: HashMap<&str, usize> = variables.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let conds = goal
            .iter()
            .map(|c| match c {
                GoalCondition::Prop { fluent, value } => {
                    let slot = index.get(fluent.as_str()).map_or_else(|| Node::Unbound(fluent.clone()), |i| Node::Var(*i));
                    Compiled::Prop(slot, *value)
                }
                GoalCondition::Numeric { expr, cmp } => {
                    let psi = match Linear::of(expr, &index).filter(|l| l.constant.is_finite() && l.terms.iter().all(|t| t.1.is_finite())) {
                        Some(l) => Psi::Linear(l),
                        None => Psi::Tree(Node::compile(expr, &index)),
                    };
                    Compiled::Numeric(psi, *cmp)
                }
            })
            .collect();
        CompiledGoal { conds }
    }

    fn distance(c: &Compiled, values: &[Value]) -> Result<f64> {
        match c {
            Compiled::Prop(slot, want) => {
                let v = match slot {
                    Node::Var(i) => &values[*i],
                    Node::Unbound(name) => return Err(ModelError::UnboundVariable(name.clone())),
                    _ => unreachable!("prop slots are variables"),
                };
                let holds = match v.as_bool() {
                    Some(b) => b == *want,
                    None => (v.as_real() != 0.0) == *want,
                };
                Ok(if holds { 0.0 } else { 1.0 })
            }
            Compiled::Numeric(e, cmp) => {
                let psi = match e {
                    Psi::Linear(l) => l.eval(values)?,
                    Psi::Tree(t) => t.eval(values)?,
                };
                Ok(match cmp {
                    Cmp::Ge | Cmp::Gt => (-psi).max(0.0),
                    Cmp::Le | Cmp::Lt => psi.max(0.0),
                    Cmp::Eq => psi.abs(),
                })
            }
        }
    }

    /// h^md over values in variable order; agrees with [`h_md`] on the
    /// corresponding fluent map up to rounding (see [`Linear`]).
    pub fn h_md(&self, values: &[Value]) -> Result<f64> {
        self.conds.iter().map(|c| Self::distance(c, values)).sum()
    }
}

/// h^md bound to a task's declarative goal, shaped for [`crate::search::gbfs`].
pub fn hmd_for<T: PlanningTask>(task: &T) -> Result<impl Fn(&T::State) -> std::result::Result<f64, String> + '_> {
    if task.goal().is_empty() {
        return Err(ModelError::schema("goal", "h^md needs a nonempty goal list"));
    }
    let compiled = CompiledGoal::new(task.goal(), &task.variables());
    let buf = RefCell::new(Vec::new());
    Ok(move |s: &T::State| {
        let mut values = buf.borrow_mut();
        task.write_fluent_values(s, &mut values);
        compiled.h_md(&values).map_err(|e| e.to_string())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Expr, Value};

    fn fl(pairs: &[(&str, Value)]) -> Fluents {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn x_minus_10(cmp: Cmp) -> GoalCondition {
        GoalCondition::numeric(Expr::sub(Expr::var("x"), Expr::Const(10.0)), cmp)
    }

    #[test]
    fn worked_distances() {
        let s = fl(&[("x", Value::Int(4))]);
        assert_eq!(condition_distance(&x_minus_10(Cmp::Ge), &s).unwrap(), 6.0);
        let s = fl(&[("x", Value::Int(13))]);
        assert_eq!(condition_distance(&x_minus_10(Cmp::Eq), &s).unwrap(), 3.0);
        let s = fl(&[("done", Value::Bool(false))]);
        assert_eq!(condition_distance(&GoalCondition::prop("done", true), &s).unwrap(), 1.0);
    }

    #[test]
    fn strict_boundary_quirk() {
        let s = fl(&[("x", Value::Int(10))]);
        let gt = x_minus_10(Cmp::Gt);
        assert!(!gt.check(&s).unwrap());
        assert_eq!(condition_distance(&gt, &s).unwrap(), 0.0);
    }

    #[test]
    fn sum_over_goal() {
        let goal = [x_minus_10(Cmp::Ge), GoalCondition::prop("done", true)];
        let s = fl(&[("x", Value::Int(4)), ("done", Value::Bool(false))]);
        assert_eq!(h_md(&s, &goal).unwrap(), 7.0);
    }

    #[test]
    fn spec_parsing() {
        assert_eq!("blind".parse::<HeuristicSpec>().unwrap(), HeuristicSpec::Blind);
        assert_eq!("hmd".parse::<HeuristicSpec>().unwrap(), HeuristicSpec::Hmd);
        assert_eq!(
            "plugin:/tmp/w".parse::<HeuristicSpec>().unwrap(),
            HeuristicSpec::Plugin("/tmp/w".into())
        );
        assert!("plugin:".parse::<HeuristicSpec>().is_err());
        assert!("hff".parse::<HeuristicSpec>().is_err());
        assert_eq!(h_blind(&()), 0.0);
    }
}
