//! Instance documents: parsing, goal resolution and the domain registry.

use std::collections::BTreeMap;

use serde_json::{Map, Value as Json};

use super::expr::parse_relation;
use super::{Cmp, GoalCondition};
use crate::domains::TaskModel;
use crate::error::{ModelError, Result};

/// Goal section of an instance document.
#[derive(Debug, Clone, PartialEq)]
pub enum GoalSpec {
    /// The domain's own structural goal.
    Builtin,
    Conditions(Vec<GoalCondition>),
}

/// A parsed instance file.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceDoc {
    pub domain: String,
    pub parameters: Map<String, Json>,
    pub initial_state: Map<String, Json>,
    pub goal: GoalSpec,
}

impl InstanceDoc {
    pub fn parse_str(text: &str) -> Result<Self> {
        let json: Json = serde_json::from_str(text)
            .map_err(|e| ModelError::schema("$", format!("invalid JSON: {e}")))?;
        Self::from_json(&json)
    }

    pub fn from_json(json: &Json) -> Result<Self> {
        let obj = json
            .as_object()
            .ok_or_else(|| ModelError::schema("$", "instance must be a JSON object"))?;
        let domain = obj
            .get("domain")
            .and_then(Json::as_str)
            .ok_or_else(|| ModelError::schema("domain", "missing or not a string"))?
            .to_string();
        let object_field = |key: &str| -> Result<Map<String, Json>> {
            match obj.get(key) {
                None | Some(Json::Null) => Ok(Map::new()),
                Some(Json::Object(m)) => Ok(m.clone()),
                Some(_) => Err(ModelError::schema(key, "must be an object")),
            }
        };
        let parameters = object_field("parameters")?;
        let initial_state = object_field("initial_state")?;
        let goal = match obj.get("goal") {
            None | Some(Json::Null) => GoalSpec::Builtin,
            Some(Json::String(s)) if s == "builtin" => GoalSpec::Builtin,
            Some(Json::Array(items)) => GoalSpec::Conditions(
                items
                    .iter()
                    .enumerate()
                    .map(|(i, item)| parse_goal_entry(item, &format!("goal[{i}]")))
                    .collect::<Result<_>>()?,
            ),
            Some(_) => return Err(ModelError::schema("goal", "expected a list or \"builtin\"")),
        };
        Ok(InstanceDoc {
            domain,
            parameters,
            initial_state,
            goal,
        })
    }

    pub fn param(&self, key: &str) -> Option<&Json> {
        self.parameters.get(key)
    }

    pub fn param_u64(&self, key: &str) -> Result<Option<u64>> {
        self.param(key)
            .map(|v| {
                v.as_u64()
                    .ok_or_else(|| ModelError::schema(format!("parameters.{key}"), "expected a nonnegative integer"))
            })
            .transpose()
    }

    pub fn param_i64(&self, key: &str) -> Result<Option<i64>> {
        self.param(key)
            .map(|v| {
                v.as_i64()
                    .ok_or_else(|| ModelError::schema(format!("parameters.{key}"), "expected an integer"))
            })
            .transpose()
    }

    pub fn param_i64_array(&self, key: &str) -> Result<Option<Vec<i64>>> {
        let Some(v) = self.param(key) else {
            return Ok(None);
        };
        let path = format!("parameters.{key}");
        let items = v
            .as_array()
            .ok_or_else(|| ModelError::schema(&path, "expected an array of integers"))?;
        items
            .iter()
            .enumerate()
            .map(|(i, x)| {
                x.as_i64()
                    .ok_or_else(|| ModelError::schema(format!("{path}[{i}]"), "expected an integer"))
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    /// Integer fluents `prefix0, prefix1, ...` from `initial_state`, if any are present.
    pub fn indexed_initial(&self, prefix: &str, len: usize) -> Result<Option<Vec<i64>>> {
        if !(0..len).any(|i| self.initial_state.contains_key(&format!("{prefix}{i}"))) {
            return Ok(None);
        }
        (0..len)
            .map(|i| {
                let key = format!("{prefix}{i}");
                self.initial_state
                    .get(&key)
                    .and_then(Json::as_i64)
                    .ok_or_else(|| ModelError::schema(format!("initial_state.{key}"), "missing or not an integer"))
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    /// Resolves the goal section against a domain's variables. `builtin` selects
    /// `default_goal`.
    pub fn resolve_goal(&self, variables: &[String], default_goal: Vec<GoalCondition>) -> Result<Vec<GoalCondition>> {
        let goal = match &self.goal {
            GoalSpec::Builtin => default_goal,
            GoalSpec::Conditions(c) => c.clone(),
        };
        check_bound(&goal, variables)?;
        Ok(goal)
    }
}

/// Every variable in `goal` must be one of `variables`.
pub fn check_bound(goal: &[GoalCondition], variables: &[String]) -> Result<()> {
    for cond in goal {
        for v in cond.variables() {
            if !variables.iter().any(|known| known == v) {
                return Err(ModelError::UnboundVariable(v.to_string()));
            }
        }
    }
    Ok(())
}

fn parse_goal_entry(item: &Json, path: &str) -> Result<GoalCondition> {
    let obj = item
        .as_object()
        .ok_or_else(|| ModelError::schema(path, "goal entry must be an object"))?;
    if let Some(fluent) = obj.get("prop") {
        let fluent = fluent
            .as_str()
            .ok_or_else(|| ModelError::schema(format!("{path}.prop"), "expected a string"))?;
        let value = match obj.get("value") {
            None => true,
            Some(v) => v
                .as_bool()
                .ok_or_else(|| ModelError::schema(format!("{path}.value"), "expected a boolean"))?,
        };
        return Ok(GoalCondition::prop(fluent, value));
    }
    let text = obj
        .get("expr")
        .and_then(Json::as_str)
        .ok_or_else(|| ModelError::schema(path, "expected `prop` or `expr`"))?;
    let explicit_cmp = obj
        .get("cmp")
        .map(|c| {
            c.as_str()
                .ok_or_else(|| "expected a string".to_string())
                .and_then(str::parse::<Cmp>)
                .map_err(|e| ModelError::schema(format!("{path}.cmp"), e))
        })
        .transpose()?;
    let (lhs, rel) = parse_relation(text).map_err(|e| ModelError::schema(format!("{path}.expr"), e))?;
    match (rel, explicit_cmp) {
        (Some((cmp, rhs)), None) => Ok(GoalCondition::relation(lhs, cmp, rhs)),
        (Some(_), Some(_)) => Err(ModelError::schema(
            format!("{path}.cmp"),
            "comparator given both inline and in `cmp`",
        )),
        (None, Some(cmp)) => Ok(GoalCondition::numeric(lhs, cmp)),
        (None, None) => Err(ModelError::schema(format!("{path}.cmp"), "missing comparator")),
    }
}

type Loader = fn(&InstanceDoc) -> Result<TaskModel>;

/// Maps domain names to instance loaders.
#[derive(Clone)]
pub struct DomainRegistry {
    loaders: BTreeMap<String, Loader>,
}

impl DomainRegistry {
    pub fn empty() -> Self {
        DomainRegistry {
            loaders: BTreeMap::new(),
        }
    }

    /// Registry with the four built-in domains.
    pub fn builtin() -> Self {
        crate::domains::builtin_registry()
    }

    pub fn register(&mut self, name: &str, loader: Loader) {
        self.loaders.insert(name.to_string(), loader);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.loaders.keys().map(String::as_str)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.loaders.contains_key(name)
    }
}

impl Default for DomainRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

/// Builds a [`TaskModel`] from a parsed instance document.
pub fn load_instance(doc: &InstanceDoc, registry: &DomainRegistry) -> Result<TaskModel> {
    let loader = registry
        .loaders
        .get(&doc.domain)
        .ok_or_else(|| ModelError::UnknownDomain(doc.domain.clone()))?;
    loader(doc)
}

/// Convenience wrapper: parse and load in one step with the built-in registry.
pub fn load_instance_str(text: &str) -> Result<TaskModel> {
    load_instance(&InstanceDoc::parse_str(text)?, &DomainRegistry::builtin())
}

/// Reads and loads an instance file.
pub fn load_instance_file(path: &std::path::Path) -> Result<TaskModel> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ModelError::schema("$", format!("cannot read {}: {e}", path.display())))?;
    load_instance_str(&text)
}
