//! Prompt construction for the three synthesis phases.

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PromptError {
    #[error("refinement requested but no instance JSON was given")]
    MissingInstance,
    #[error("domain source is empty")]
    EmptySource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptOptions {
    pub strategize: bool,
    pub refine: bool,
}

impl Default for PromptOptions {
    fn default() -> Self {
        PromptOptions { strategize: true, refine: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Strategize,
    Unrefined,
    Refined,
}

impl Phase {
    /// Directory name in the offline fixture layout.
    pub fn dir_name(self) -> &'static str {
        match self {
            Phase::Strategize => "strategize",
            Phase::Unrefined => "unrefined",
            Phase::Refined => "refined",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub phase1_strategize: Option<String>,
    pub phase2_unrefined: String,
    pub phase3_refine: Option<String>,
    pub domain_source: String,
    pub instance_json: Option<String>,
}

impl PromptBundle {
    /// The enabled phases in conversation order.
    pub fn phases(&self) -> Vec<(Phase, &str)> {
        let mut out = Vec::new();
        if let Some(p) = &self.phase1_strategize {
            out.push((Phase::Strategize, p.as_str()));
        }
        out.push((Phase::Unrefined, self.phase2_unrefined.as_str()));
        if let Some(p) = &self.phase3_refine {
            out.push((Phase::Refined, p.as_str()));
        }
        out
    }

    /// Phase whose reply carries the final source.
    pub fn final_phase(&self) -> Phase {
        if self.phase3_refine.is_some() {
            Phase::Refined
        } else {
            Phase::Unrefined
        }
    }
}

pub const GUIDELINES: [&str; 5] = [
    "The heuristic does not need to be admissible; ignore admissibility entirely.",
    "Aim for values approximating monotonous decrease as the given state gets closer to the goal.",
    "Avoid compilation errors: use only the Rust standard library and the domain types shown, and keep the signature exactly as given.",
    "Keep the function fast; it is called once for every generated state.",
    "Do not ask for clarification. Answer with one complete fenced Rust code block.",
];

fn domain_block(source: &str) -> String {
    format!(
        "The planning domain is implemented by the following Rust module. `successors` is the successor generator and `is_goal` the goal test.\n\n```rust\n{}\n```\n",
        source.trim_end()
    )
}

/// Builds the prompts for one synthesis attempt. `signature` is the exact
/// heuristic signature the worker template expects.
pub fn build_prompts(
    domain_source: &str,
    signature: &str,
    instance_json: Option<&str>,
    options: PromptOptions,
) -> Result<PromptBundle, PromptError> {
    if domain_source.trim().is_empty() {
        return Err(PromptError::EmptySource);
    }
    if options.refine && instance_json.is_none() {
        return Err(PromptError::MissingInstance);
    }
    let phase1 = options.strategize.then(|| {
        format!(
            "{}\nDescribe in plain English a heuristic function for greedy best-first search in this domain. \
             It estimates how far a state is from satisfying the goal. Do not write code yet.",
            domain_block(domain_source)
        )
    });

    let mut phase2 = String::new();
    if options.strategize {
        phase2.push_str("Now implement the heuristic you described in Rust.\n\n");
    } else {
        phase2.push_str(&domain_block(domain_source));
        phase2.push_str("\nWrite a heuristic function for greedy best-first search in this domain, in Rust.\n\n");
    }
    phase2.push_str("The function must have precisely this signature:\n\n```rust\n");
    phase2.push_str(signature);
    phase2.push_str("\n```\n\nThe domain types and `PlanningTask` are already in scope; `use` lines for them are allowed but not needed.\n\nGuidelines:\n");
    for g in GUIDELINES {
        phase2.push_str("- ");
        phase2.push_str(g);
        phase2.push('\n');
    }

    let phase3 = match (options.refine, instance_json) {
        (true, Some(inst)) => Some(format!(
            "This is the problem instance the heuristic will be used on:\n\n```json\n{}\n```\n\n\
             Refine your heuristic for this instance. Keep the same signature and reply with the complete code in one fenced Rust block.",
            inst.trim_end()
        )),
        _ => None,
    };

    Ok(PromptBundle {
        phase1_strategize: phase1,
        phase2_unrefined: phase2,
        phase3_refine: phase3,
        domain_source: domain_source.to_string(),
        instance_json: instance_json.map(str::to_string),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SIG: &str = "pub fn heuristic(task: &Counters, state: &CountersState) -> f64";

    #[test]
    fn phase_selection() {
        let b = build_prompts("fn f() {}", SIG, None, PromptOptions { strategize: false, refine: false }).unwrap();
        assert!(b.phase1_strategize.is_none() && b.phase3_refine.is_none());
        assert!(b.phase2_unrefined.contains(SIG));
        assert!(b.phase2_unrefined.contains("fn f() {}"));
        assert_eq!(b.phases().len(), 1);

        let b = build_prompts("fn f() {}", SIG, Some("{}"), PromptOptions { strategize: true, refine: true }).unwrap();
        assert_eq!(
            b.phases().iter().map(|p| p.0).collect::<Vec<_>>(),
            [Phase::Strategize, Phase::Unrefined, Phase::Refined]
        );
        assert_eq!(b.final_phase(), Phase::Refined);
        assert!(b.phase1_strategize.as_ref().unwrap().contains("fn f() {}"));
        assert!(b.phase2_unrefined.contains("monotonous decrease"));
    }

    #[test]
    fn refine_needs_instance() {
        let e = build_prompts("fn f() {}", SIG, None, PromptOptions { strategize: true, refine: true });
        assert_eq!(e, Err(PromptError::MissingInstance));
        assert_eq!(build_prompts("  ", SIG, None, PromptOptions::default()), Err(PromptError::EmptySource));
    }
}
