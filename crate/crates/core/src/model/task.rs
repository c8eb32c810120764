use std::collections::BTreeMap;
use std::fmt::Debug;
use std::hash::Hash;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{GoalCondition, InstanceDoc, Value};
use crate::error::Result;

/// Named view of a state: variable name to value.
pub type Fluents = BTreeMap<String, Value>;

/// One applicable action and the state it leads to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transition<S> {
    /// Shared so that domains can hand out precomputed labels without copying.
    pub action_label: Arc<str>,
    pub cost: f64,
    pub successor: S,
}

impl<S> Transition<S> {
    pub fn new(action_label: impl Into<Arc<str>>, successor: S) -> Self {
        Transition {
            action_label: action_label.into(),
            cost: 1.0,
            successor,
        }
    }

    pub fn label(&self) -> &str {
        &self.action_label
    }
}

/// An executable planning task: initial state, successor generator, goal test
/// and the declarative goal list the executable test must agree with.
///
/// Implementations are immutable after loading; successor generation must be
/// a pure function of the state.
pub trait PlanningTask: Send + Sync {
    type State: Clone + Eq + Hash + Debug + Serialize + DeserializeOwned + Send + Sync + 'static;

    fn domain_name(&self) -> &'static str;

    fn initial_state(&self) -> Self::State;

    /// Applicable transitions. Labels are unique per state.
    fn successors(&self, state: &Self::State) -> Vec<Transition<Self::State>>;

    fn is_goal(&self, state: &Self::State) -> bool;

    fn fluents(&self, state: &Self::State) -> Fluents;

    /// Names of every fluent exposed by [`PlanningTask::fluents`].
    fn variables(&self) -> Vec<String>;

    /// Fluent values in [`PlanningTask::variables`] order.
    fn fluent_values(&self, state: &Self::State) -> Vec<Value> {
        let mut out = Vec::new();
        self.write_fluent_values(state, &mut out);
        out
    }

    /// [`PlanningTask::fluent_values`] into a reused buffer.
    fn write_fluent_values(&self, state: &Self::State, out: &mut Vec<Value>) {
        let mut f = self.fluents(state);
        out.clear();
        out.extend(self.variables().iter().map(|v| f.remove(v).expect("fluents() covers variables()")));
    }

    fn goal(&self) -> &[GoalCondition];
}

/// A planning task that can be built from an instance document.
pub trait Domain: PlanningTask + Sized {
    const NAME: &'static str;

    fn load(doc: &InstanceDoc) -> Result<Self>;
}
