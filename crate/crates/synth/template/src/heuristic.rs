#![allow(unused_imports, dead_code, unused_variables, unused_mut)]

use heursynth_core::domains::{{MODULE}}::*;
use heursynth_core::model::PlanningTask;

// HEURISTIC SLOT
{{SOURCE}}
