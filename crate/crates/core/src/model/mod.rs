//! The planning-task contract, expressions, goal conditions and instance loading.

mod condition;
mod expr;
mod instance;
mod task;
mod value;

pub use condition::{Cmp, GoalCondition};
pub use expr::{parse_expr, parse_relation, Expr};
pub use instance::{
    check_bound, load_instance, load_instance_file, load_instance_str, DomainRegistry, GoalSpec, InstanceDoc,
};
pub use task::{Domain, Fluents, PlanningTask, Transition};
pub use value::Value;

/// Evaluates `expr` in `state`.
pub fn eval_expr<T: PlanningTask>(task: &T, expr: &Expr, state: &T::State) -> crate::Result<f64> {
    expr.eval(&task.fluents(state))
}

/// Checks one goal condition in `state`.
pub fn check_condition<T: PlanningTask>(task: &T, cond: &GoalCondition, state: &T::State) -> crate::Result<bool> {
    cond.check(&task.fluents(state))
}
