use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Expr, Fluents};
use crate::error::{ModelError, Result};

/// Comparison operator of a numeric condition `psi <cmp> 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cmp {
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
}

impl Cmp {
    pub fn holds(self, lhs: f64, rhs: f64) -> bool {
        match self {
            Cmp::Gt => lhs > rhs,
            Cmp::Ge => lhs >= rhs,
            Cmp::Eq => lhs == rhs,
            Cmp::Le => lhs <= rhs,
            Cmp::Lt => lhs < rhs,
        }
    }

    pub fn is_strict(self) -> bool {
        matches!(self, Cmp::Gt | Cmp::Lt)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Cmp::Gt => ">",
            Cmp::Ge => ">=",
            Cmp::Eq => "=",
            Cmp::Le => "<=",
            Cmp::Lt => "<",
        }
    }
}

impl fmt::Display for Cmp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Cmp {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            ">" => Ok(Cmp::Gt),
            ">=" | "≥" => Ok(Cmp::Ge),
            "=" | "==" => Ok(Cmp::Eq),
            "<=" | "≤" => Ok(Cmp::Le),
            "<" => Ok(Cmp::Lt),
            other => Err(format!("unknown comparator `{other}`")),
        }
    }
}

/// One goal condition. Numeric conditions always compare against zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GoalCondition {
    Prop { fluent: String, value: bool },
    Numeric { expr: Expr, cmp: Cmp },
}

impl GoalCondition {
    pub fn prop(fluent: impl Into<String>, value: bool) -> Self {
        GoalCondition::Prop {
            fluent: fluent.into(),
            value,
        }
    }

    /// Builds `lhs cmp rhs` in the normalized form `(lhs - rhs) cmp 0`.
    pub fn relation(lhs: Expr, cmp: Cmp, rhs: Expr) -> Self {
        let psi = if rhs == Expr::Const(0.0) {
            lhs
        } else {
            Expr::sub(lhs, rhs)
        };
        GoalCondition::Numeric {
            expr: psi.fold_constants(),
            cmp,
        }
    }

    /// `psi cmp 0` with constants folded.
    pub fn numeric(psi: Expr, cmp: Cmp) -> Self {
        GoalCondition::Numeric {
            expr: psi.fold_constants(),
            cmp,
        }
    }

    pub fn check(&self, fluents: &Fluents) -> Result<bool> {
        match self {
            GoalCondition::Prop { fluent, value } => {
                let v = fluents
                    .get(fluent)
                    .ok_or_else(|| ModelError::UnboundVariable(fluent.clone()))?;
                match v.as_bool() {
                    Some(b) => Ok(b == *value),
                    None => Ok((v.as_real() != 0.0) == *value),
                }
            }
            GoalCondition::Numeric { expr, cmp } => Ok(cmp.holds(expr.eval(fluents)?, 0.0)),
        }
    }

    pub fn variables(&self) -> Vec<&str> {
        match self {
            GoalCondition::Prop { fluent, .. } => vec![fluent.as_str()],
            GoalCondition::Numeric { expr, .. } => expr.variables(),
        }
    }

    pub fn uses_strict_comparator(&self) -> bool {
        matches!(self, GoalCondition::Numeric { cmp, .. } if cmp.is_strict())
    }
}

impl fmt::Display for GoalCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GoalCondition::Prop { fluent, value } => write!(f, "{fluent} = {value}"),
            GoalCondition::Numeric { expr, cmp } => write!(f, "{expr} {cmp} 0"),
        }
    }
}
