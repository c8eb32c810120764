//! Budgeted BFS and greedy best-first search with duplicate detection.
//!
//! Both algorithms share one loop: a state is recorded as seen when first
//! generated and is never queued again, the goal test runs at expansion, and
//! the open list is FIFO among equal keys. With `h = 0` GBFS therefore expands
//! exactly the BFS order.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::hash::BuildHasher;
use std::sync::Arc;
use std::time::{Duration, Instant};

use hashbrown::{DefaultHashBuilder, HashTable};
use ordered_float::OrderedFloat;
use serde::{Deserialize, Serialize};

use crate::model::PlanningTask;

pub const GIB: u64 = 1 << 30;
pub const MIB: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Bfs,
    Gbfs,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::Bfs => "bfs",
            Algorithm::Gbfs => "gbfs",
        })
    }
}

/// How often (in expansions) the memory estimate is checked.
const MEMORY_CHECK_INTERVAL: u64 = 1024;

/// Resource budget for one search run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Limits {
    pub wall_clock_seconds: f64,
    pub memory_bytes: u64,
    #[serde(default)]
    pub max_expansions: Option<u64>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            wall_clock_seconds: 600.0,
            memory_bytes: 8 * GIB,
            max_expansions: None,
        }
    }
}

impl Limits {
    pub fn new(wall_clock_seconds: f64, memory_bytes: u64) -> Self {
        Limits {
            wall_clock_seconds,
            memory_bytes,
            max_expansions: None,
        }
    }

    pub fn with_max_expansions(mut self, n: u64) -> Self {
        self.max_expansions = Some(n);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Solved(Vec<String>),
    /// The reachable state space was fully expanded without reaching a goal.
    Exhausted,
    TimedOut,
    MemoryOut,
    /// `max_expansions` was reached.
    ExpansionLimit,
    HeuristicError(String),
}

impl Outcome {
    pub fn is_solved(&self) -> bool {
        matches!(self, Outcome::Solved(_))
    }

    pub fn plan(&self) -> Option<&[String]> {
        match self {
            Outcome::Solved(p) => Some(p),
            _ => None,
        }
    }

    /// Wire name used in result JSON.
    pub fn wire_name(&self) -> &'static str {
        match self {
            Outcome::Solved(_) => "solved",
            Outcome::Exhausted => "exhausted",
            Outcome::TimedOut => "timed_out",
            Outcome::MemoryOut => "memory_out",
            Outcome::ExpansionLimit => "expansion_limit",
            Outcome::HeuristicError(_) => "heuristic_error",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub expanded: u64,
    pub generated: u64,
    pub duplicates: u64,
    pub elapsed_seconds: f64,
    pub peak_open: u64,
    pub peak_closed: u64,
}

/// Outcome plus statistics. Serializes to the worker wire format
/// `{"outcome": ..., "plan": [...], "stats": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "WireResult", try_from = "WireResult")]
pub struct SearchResult {
    pub outcome: Outcome,
    pub stats: SearchStats,
}

impl SearchResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("results serialize")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

#[derive(Serialize, Deserialize)]
struct WireResult {
    outcome: String,
    #[serde(default)]
    plan: Vec<String>,
    #[serde(default)]
    stats: SearchStats,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

impl From<SearchResult> for WireResult {
    fn from(r: SearchResult) -> Self {
        let outcome = r.outcome.wire_name().to_string();
        let (plan, detail) = match r.outcome {
            Outcome::Solved(plan) => (plan, None),
            Outcome::HeuristicError(d) => (Vec::new(), Some(d)),
            _ => (Vec::new(), None),
        };
        WireResult {
            outcome,
            plan,
            stats: r.stats,
            detail,
        }
    }
}

impl TryFrom<WireResult> for SearchResult {
    type Error = String;

    fn try_from(w: WireResult) -> Result<Self, Self::Error> {
        let outcome = match w.outcome.as_str() {
            "solved" => Outcome::Solved(w.plan),
            "exhausted" => Outcome::Exhausted,
            "timed_out" => Outcome::TimedOut,
            "memory_out" => Outcome::MemoryOut,
            "expansion_limit" => Outcome::ExpansionLimit,
            "heuristic_error" => Outcome::HeuristicError(w.detail.unwrap_or_default()),
            other => return Err(format!("unknown outcome `{other}`")),
        };
        Ok(SearchResult { outcome, stats: w.stats })
    }
}

struct Node {
    parent: u32,
    label: u32,
    /// Start of the packed state in the arena; it ends where the next begins.
    offset: u64,
}

const ROOT: u32 = u32::MAX;

enum Frontier {
    /// BFS order is node creation order, so the open list is a cursor.
    Fifo(usize),
    /// Node ids grow with insertion, so they double as the FIFO tie-break.
    Greedy(BinaryHeap<Reverse<(OrderedFloat<f64>, u32)>>),
}

/// Reads the clock once per stride of generated children. The stride grows
/// while checks come quickly and shrinks when a slow heuristic spaces them out.
struct Pacer {
    start: Instant,
    deadline: Duration,
    last: Duration,
    stride: u32,
    left: u32,
}

impl Pacer {
    const MAX_STRIDE: u32 = 256;

    fn new(start: Instant, deadline: Duration) -> Self {
        Pacer { start, deadline, last: Duration::ZERO, stride: 1, left: 0 }
    }

    fn expired(&mut self) -> bool {
        if self.left > 0 {
            self.left -= 1;
            return false;
        }
        let now = self.start.elapsed();
        if now >= self.deadline {
            return true;
        }
        let gap = now.saturating_sub(self.last);
        if gap < Duration::from_micros(100) {
            self.stride = (self.stride * 2).min(Self::MAX_STRIDE);
        } else if gap > Duration::from_millis(1) {
            self.stride = (self.stride / 2).max(1);
        }
        self.last = now;
        self.left = self.stride - 1;
        false
    }
}

/// Every generated state, packed back to back. Encodings are canonical for
/// the built-in domains, so equal bytes mean equal states.
struct Registry {
    bytes: Vec<u8>,
    nodes: Vec<Node>,
    /// (hash, id); keeping the hash avoids touching the arena when the table grows
    seen: HashTable<(u32, u32)>,
    hasher: DefaultHashBuilder,
}

impl Registry {
    fn packed(&self, id: u32) -> &[u8] {
        let start = self.nodes[id as usize].offset as usize;
        let end = self.nodes.get(id as usize + 1).map_or(self.bytes.len(), |n| n.offset as usize);
        &self.bytes[start..end]
    }

    fn state<S: serde::de::DeserializeOwned>(&self, id: u32) -> S {
        postcard::from_bytes(self.packed(id)).expect("registry holds valid encodings")
    }

    /// Id of an equal state already registered, if any.
    fn find(&self, hash: u32, packed: &[u8]) -> Option<u32> {
        self.seen.find(spread(hash), |&(h, i)| h == hash && self.packed(i) == packed).map(|e| e.1)
    }

    fn hash(&self, packed: &[u8]) -> u32 {
        (self.hasher.hash_one(packed) >> 32) as u32
    }

    fn insert(&mut self, hash: u32, packed: &[u8], parent: u32, label: u32) -> u32 {
        let id = self.nodes.len() as u32;
        self.nodes.push(Node { parent, label, offset: self.bytes.len() as u64 });
        self.bytes.extend_from_slice(packed);
        self.seen.insert_unique(spread(hash), (hash, id), |e| spread(e.0));
        id
    }

    fn heap_bytes(&self) -> u64 {
        (self.bytes.capacity() + self.nodes.capacity() * std::mem::size_of::<Node>() + self.seen.capacity() * 9) as u64
    }
}

/// Table hash from the stored 32 bits, so regrowth never rereads the arena.
fn spread(h: u32) -> u64 {
    (h as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn encode<S: Serialize>(state: &S, buf: &mut Vec<u8>) {
    buf.clear();
    *buf = postcard::to_extend(state, std::mem::take(buf)).expect("states serialize");
}

fn extract_plan(nodes: &[Node], labels: &[Arc<str>], mut id: u32) -> Vec<String> {
    let mut plan = Vec::new();
    while nodes[id as usize].parent != ROOT {
        plan.push(labels[nodes[id as usize].label as usize].to_string());
        id = nodes[id as usize].parent;
    }
    plan.reverse();
    plan
}

/// Shared search loop. `heuristic = None` gives breadth-first search.
fn run<T, H>(
    task: &T,
    mut heuristic: Option<H>,
    limits: &Limits,
    on_expand: &mut dyn FnMut(&T::State),
) -> SearchResult
where
    T: PlanningTask,
    H: FnMut(&T::State) -> Result<f64, String>,
{
    let start = Instant::now();
    let deadline = Duration::from_secs_f64(limits.wall_clock_seconds.max(0.0));
    let mut stats = SearchStats::default();
    let finish = |outcome: Outcome, mut stats: SearchStats| {
        stats.elapsed_seconds = start.elapsed().as_secs_f64();
        SearchResult { outcome, stats }
    };

    let greedy = heuristic.is_some();
    let mut evaluate = |s: &T::State| -> Result<f64, String> {
        match heuristic.as_mut() {
            None => Ok(0.0),
            Some(h) => match h(s) {
                Ok(v) if v.is_nan() => Err("heuristic returned NaN".into()),
                other => other,
            },
        }
    };

    let initial = task.initial_state();
    let h0 = match evaluate(&initial) {
        Ok(h) => h,
        Err(e) => return finish(Outcome::HeuristicError(e), stats),
    };
    let mut reg = Registry { bytes: Vec::new(), nodes: Vec::new(), seen: HashTable::new(), hasher: DefaultHashBuilder::default() };
    let mut buf = Vec::new();
    encode(&initial, &mut buf);
    reg.insert(reg.hash(&buf), &buf, ROOT, 0);
    drop(initial);
    let mut labels: Vec<Arc<str>> = Vec::new();
    let mut label_ids: HashMap<Arc<str>, u32> = HashMap::new();
    let mut frontier = if greedy {
        Frontier::Greedy(BinaryHeap::from([Reverse((OrderedFloat(h0), 0))]))
    } else {
        Frontier::Fifo(0)
    };
    stats.peak_open = 1;
    let mut pacer = Pacer::new(start, deadline);

    loop {
        if start.elapsed() >= deadline {
            return finish(Outcome::TimedOut, stats);
        }
        if limits.max_expansions.is_some_and(|m| stats.expanded >= m) {
            return finish(Outcome::ExpansionLimit, stats);
        }
        let popped = match &mut frontier {
            Frontier::Fifo(next) if *next < reg.nodes.len() => {
                *next += 1;
                Some(*next as u32 - 1)
            }
            Frontier::Fifo(_) => None,
            Frontier::Greedy(heap) => heap.pop().map(|Reverse((_, id))| id),
        };
        let Some(id) = popped else {
            return finish(Outcome::Exhausted, stats);
        };
        stats.expanded += 1;
        stats.peak_closed = stats.expanded;
        let state: T::State = reg.state(id);
        on_expand(&state);

        if task.is_goal(&state) {
            return finish(Outcome::Solved(extract_plan(&reg.nodes, &labels, id)), stats);
        }

        for t in task.successors(&state) {
            stats.generated += 1;
            encode(&t.successor, &mut buf);
            let hash = reg.hash(&buf);
            if reg.find(hash, &buf).is_some() {
                stats.duplicates += 1;
                continue;
            }
            if pacer.expired() {
                return finish(Outcome::TimedOut, stats);
            }
            let h = match evaluate(&t.successor) {
                Ok(h) => h,
                Err(e) => return finish(Outcome::HeuristicError(e), stats),
            };
            if reg.nodes.len() >= ROOT as usize {
                return finish(Outcome::MemoryOut, stats);
            }
            let label = match label_ids.get(t.label()) {
                Some(l) => *l,
                None => {
                    let l = labels.len() as u32;
                    labels.push(t.action_label.clone());
                    label_ids.insert(t.action_label, l);
                    l
                }
            };
            let child = reg.insert(hash, &buf, id, label);
            if let Frontier::Greedy(heap) = &mut frontier {
                heap.push(Reverse((OrderedFloat(h), child)));
            }
        }
        let open = match &frontier {
            Frontier::Fifo(next) => (reg.nodes.len() - next) as u64,
            Frontier::Greedy(heap) => heap.len() as u64,
        };
        stats.peak_open = stats.peak_open.max(open);

        if stats.expanded % MEMORY_CHECK_INTERVAL == 0 {
            let heap = match &frontier {
                Frontier::Fifo(_) => 0,
                Frontier::Greedy(heap) => heap.capacity() * 16,
            };
            if reg.heap_bytes() + heap as u64 > limits.memory_bytes {
                return finish(Outcome::MemoryOut, stats);
            }
        }
    }
}

type NoHeuristic<S> = fn(&S) -> Result<f64, String>;

/// Blind breadth-first search. Plans are shortest under unit costs.
pub fn bfs<T: PlanningTask>(task: &T, limits: &Limits) -> SearchResult {
    run(task, None::<NoHeuristic<T::State>>, limits, &mut |_| {})
}

/// [`bfs`] reporting every expanded state to `on_expand`.
pub fn bfs_traced<T: PlanningTask>(task: &T, limits: &Limits, on_expand: &mut dyn FnMut(&T::State)) -> SearchResult {
    run(task, None::<NoHeuristic<T::State>>, limits, on_expand)
}

/// Greedy best-first search ordered by ascending `h`, FIFO among ties.
/// An `Err` or NaN from `h` ends the run with [`Outcome::HeuristicError`].
pub fn gbfs<T, H>(task: &T, h: H, limits: &Limits) -> SearchResult
where
    T: PlanningTask,
    H: FnMut(&T::State) -> Result<f64, String>,
{
    run(task, Some(h), limits, &mut |_| {})
}

/// [`gbfs`] reporting every expanded state to `on_expand`.
pub fn gbfs_traced<T, H>(task: &T, h: H, limits: &Limits, on_expand: &mut dyn FnMut(&T::State)) -> SearchResult
where
    T: PlanningTask,
    H: FnMut(&T::State) -> Result<f64, String>,
{
    run(task, Some(h), limits, on_expand)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wire_format_field_names() {
        let r = SearchResult {
            outcome: Outcome::Solved(vec!["inc c1".into()]),
            stats: SearchStats {
                expanded: 2,
                generated: 3,
                ..Default::default()
            },
        };
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["outcome"], "solved");
        assert_eq!(v["plan"][0], "inc c1");
        for key in ["expanded", "generated", "duplicates", "elapsed_seconds", "peak_open", "peak_closed"] {
            assert!(v["stats"].get(key).is_some(), "{key}");
        }
        assert_eq!(SearchResult::from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn heuristic_error_detail_survives_the_wire() {
        let r = SearchResult {
            outcome: Outcome::HeuristicError("boom".into()),
            stats: SearchStats::default(),
        };
        assert_eq!(SearchResult::from_json(&r.to_json()).unwrap().outcome, r.outcome);
        assert!(SearchResult::from_json(r#"{"outcome":"weird"}"#).is_err());
    }
}
