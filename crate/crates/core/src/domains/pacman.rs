//! Deterministic Pacman on a walled grid.
//!
//! Each turn runs in a fixed order:
//! 1. Pacman moves one cell (N/E/S/W); walls and the grid edge block the move.
//! 2. A pellet or power-up on the new cell is consumed. A power-up sets
//!    `power_timer` to `power_duration`.
//! 3. Every ghost takes the next step of its cyclic script. A blocked step
//!    leaves the ghost in place; an empty script means the ghost never moves.
//! 4. Collisions: Pacman and a ghost on the same cell, or having swapped
//!    cells this turn. With `power_timer > 0` the ghost is banished,
//!    otherwise Pacman dies and the state is a dead end.
//! 5. `power_timer` counts down by one if positive.
//!
//! The goal is every pellet eaten with Pacman alive.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::model::{Cmp, Domain, Expr, Fluents, GoalCondition, GoalSpec, InstanceDoc, PlanningTask, Transition, Value};

/// (row, col)
pub type Pos = (i32, i32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dir {
    N,
    E,
    S,
    W,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::N, Dir::E, Dir::S, Dir::W];

    pub fn delta(self) -> Pos {
        match self {
            Dir::N => (-1, 0),
            Dir::E => (0, 1),
            Dir::S => (1, 0),
            Dir::W => (0, -1),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Dir::N => "N",
            Dir::E => "E",
            Dir::S => "S",
            Dir::W => "W",
        }
    }

    pub fn from_char(c: char) -> Option<Dir> {
        match c.to_ascii_uppercase() {
            'N' => Some(Dir::N),
            'E' => Some(Dir::E),
            'S' => Some(Dir::S),
            'W' => Some(Dir::W),
            _ => None,
        }
    }

    pub fn step(self, (r, c): Pos) -> Pos {
        let (dr, dc) = self.delta();
        (r + dr, c + dc)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ghost {
    pub pos: Pos,
    /// Index into the ghost's script of the next move.
    pub script_index: usize,
    /// Which script this ghost follows; fixed for its lifetime.
    pub id: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PacmanState {
    pub pacman: Pos,
    pub ghosts: Vec<Ghost>,
    pub pellets: BTreeSet<Pos>,
    pub powerups: BTreeSet<Pos>,
    pub power_timer: u32,
    pub dead: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inapplicable;

#[derive(Debug, Clone)]
pub struct Pacman {
    pub rows: i32,
    pub cols: i32,
    walls: Vec<bool>,
    pub power_duration: u32,
    pub scripts: Vec<Vec<Dir>>,
    pub initial: PacmanState,
    goal: Vec<GoalCondition>,
    custom_goal: bool,
}

pub const DEFAULT_POWER_DURATION: u32 = 10;

impl Pacman {
    /// Builds a task from grid rows using `#` wall, `.` pellet, `o` power-up,
    /// `P` Pacman, `G` ghost and space for empty. Ghosts are numbered in
    /// row-major order and take the script at the same index.
    pub fn from_grid(grid: &[&str], scripts: Vec<Vec<Dir>>, power_duration: u32) -> Result<Self> {
        let rows = grid.len();
        let cols = grid.iter().map(|r| r.chars().count()).max().unwrap_or(0);
        if rows == 0 || cols == 0 {
            return Err(ModelError::schema("parameters.grid", "empty grid"));
        }
        let mut walls = vec![false; rows * cols];
        let mut pacman = None;
        let mut ghosts = Vec::new();
        let mut pellets = BTreeSet::new();
        let mut powerups = BTreeSet::new();
        for (r, line) in grid.iter().enumerate() {
            let mut chars: Vec<char> = line.chars().collect();
            chars.resize(cols, ' ');
            for (c, ch) in chars.into_iter().enumerate() {
                let pos = (r as i32, c as i32);
                match ch {
                    '#' => walls[r * cols + c] = true,
                    '.' => {
                        pellets.insert(pos);
                    }
                    'o' => {
                        powerups.insert(pos);
                    }
                    'P' => {
                        if pacman.replace(pos).is_some() {
                            return Err(ModelError::schema("parameters.grid", "more than one `P`"));
                        }
                    }
                    'G' => {
                        let id = ghosts.len();
                        ghosts.push(Ghost {
                            pos,
                            script_index: 0,
                            id,
                        })
                    }
                    ' ' => {}
                    other => {
                        return Err(ModelError::schema(
                            format!("parameters.grid[{r}]"),
                            format!("unknown cell `{other}`"),
                        ))
                    }
                }
            }
        }
        let pacman = pacman.ok_or_else(|| ModelError::schema("parameters.grid", "no `P` cell"))?;
        if scripts.len() > ghosts.len() {
            return Err(ModelError::schema("parameters.ghost_scripts", "more scripts than ghosts"));
        }
        let mut scripts = scripts;
        scripts.resize(ghosts.len(), Vec::new());
        let initial = PacmanState {
            pacman,
            ghosts,
            pellets,
            powerups,
            power_timer: 0,
            dead: false,
        };
        Ok(Pacman {
            rows: rows as i32,
            cols: cols as i32,
            walls,
            power_duration,
            scripts,
            initial,
            goal: Self::default_goal(),
            custom_goal: false,
        })
    }

    /// `pellets_remaining = 0` and not dead.
    pub fn default_goal() -> Vec<GoalCondition> {
        vec![
            GoalCondition::numeric(Expr::var("pellets_remaining"), Cmp::Eq),
            GoalCondition::prop("dead", false),
        ]
    }

    pub fn is_open(&self, (r, c): Pos) -> bool {
        r >= 0 && c >= 0 && r < self.rows && c < self.cols && !self.walls[(r * self.cols + c) as usize]
    }

    pub fn is_wall(&self, pos: Pos) -> bool {
        !self.is_open(pos)
    }

    /// Advances one turn with Pacman moving in `dir`.
    pub fn step(&self, state: &PacmanState, dir: Dir) -> std::result::Result<PacmanState, Inapplicable> {
        if state.dead {
            return Err(Inapplicable);
        }
        let from = state.pacman;
        let to = dir.step(from);
        if !self.is_open(to) {
            return Err(Inapplicable);
        }
        let mut next = state.clone();
        next.pacman = to;

        next.pellets.remove(&to);
        if next.powerups.remove(&to) {
            next.power_timer = self.power_duration;
        }

        let moves: Vec<(Pos, Pos)> = next
            .ghosts
            .iter_mut()
            .map(|g| {
                let before = g.pos;
                let script = &self.scripts[g.id];
                if !script.is_empty() {
                    let target = script[g.script_index].step(g.pos);
                    if self.is_open(target) {
                        g.pos = target;
                    }
                    g.script_index = (g.script_index + 1) % script.len();
                }
                (before, g.pos)
            })
            .collect();

        let mut keep = Vec::with_capacity(next.ghosts.len());
        for (ghost, (before, after)) in next.ghosts.drain(..).zip(moves) {
            let hit = after == to || (after == from && before == to);
            if !hit {
                keep.push(ghost);
            } else if next.power_timer > 0 {
                // banished
            } else {
                next.dead = true;
                keep.push(ghost);
            }
        }
        next.ghosts = keep;

        next.power_timer = next.power_timer.saturating_sub(1);
        Ok(next)
    }
}

impl PlanningTask for Pacman {
    type State = PacmanState;

    fn domain_name(&self) -> &'static str {
        Self::NAME
    }

    fn initial_state(&self) -> PacmanState {
        self.initial.clone()
    }

    fn successors(&self, state: &PacmanState) -> Vec<Transition<PacmanState>> {
        Dir::ALL
            .iter()
            .filter_map(|&d| self.step(state, d).ok().map(|s| Transition::new(d.label(), s)))
            .collect()
    }

    fn is_goal(&self, state: &PacmanState) -> bool {
        if self.custom_goal {
            let fluents = self.fluents(state);
            self.goal.iter().all(|c| c.check(&fluents).unwrap_or(false))
        } else {
            state.pellets.is_empty() && !state.dead
        }
    }

    fn fluents(&self, state: &PacmanState) -> Fluents {
        Fluents::from([
            ("pacman_row".to_string(), Value::Int(state.pacman.0 as i64)),
            ("pacman_col".to_string(), Value::Int(state.pacman.1 as i64)),
            ("pellets_remaining".to_string(), Value::Int(state.pellets.len() as i64)),
            ("powerups_remaining".to_string(), Value::Int(state.powerups.len() as i64)),
            ("ghosts_remaining".to_string(), Value::Int(state.ghosts.len() as i64)),
            ("power_timer".to_string(), Value::Int(state.power_timer as i64)),
            ("dead".to_string(), Value::Bool(state.dead)),
        ])
    }

    fn variables(&self) -> Vec<String> {
        [
            "pacman_row",
            "pacman_col",
            "pellets_remaining",
            "powerups_remaining",
            "ghosts_remaining",
            "power_timer",
            "dead",
        ]
        .map(String::from)
        .to_vec()
    }

    fn write_fluent_values(&self, state: &PacmanState, out: &mut Vec<Value>) {
        out.clear();
        out.extend([
            Value::Int(state.pacman.0 as i64),
            Value::Int(state.pacman.1 as i64),
            Value::Int(state.pellets.len() as i64),
            Value::Int(state.powerups.len() as i64),
            Value::Int(state.ghosts.len() as i64),
            Value::Int(state.power_timer as i64),
            Value::Bool(state.dead),
        ]);
    }

    fn goal(&self) -> &[GoalCondition] {
        &self.goal
    }
}

fn parse_script(v: &serde_json::Value, path: &str) -> Result<Vec<Dir>> {
    let bad = || ModelError::schema(path, "expected a string of N/E/S/W or a list of them");
    let letters: Vec<char> = match v {
        serde_json::Value::String(s) => s.chars().filter(|c| !c.is_whitespace() && *c != ',').collect(),
        serde_json::Value::Array(items) => items
            .iter()
            .map(|x| {
                let s = x.as_str().ok_or_else(bad)?;
                let mut cs = s.chars();
                match (cs.next(), cs.next()) {
                    (Some(c), None) => Ok(c),
                    _ => Err(bad()),
                }
            })
            .collect::<Result<_>>()?,
        _ => return Err(bad()),
    };
    letters.into_iter().map(|c| Dir::from_char(c).ok_or_else(bad)).collect()
}

impl Domain for Pacman {
    const NAME: &'static str = "pacman";

    fn load(doc: &InstanceDoc) -> Result<Self> {
        let grid = doc
            .param("grid")
            .and_then(|g| g.as_array())
            .ok_or_else(|| ModelError::schema("parameters.grid", "expected an array of strings"))?;
        let grid: Vec<&str> = grid
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r.as_str()
                    .ok_or_else(|| ModelError::schema(format!("parameters.grid[{i}]"), "expected a string"))
            })
            .collect::<Result<_>>()?;
        let scripts = match doc.param("ghost_scripts") {
            None => Vec::new(),
            Some(serde_json::Value::Array(items)) => items
                .iter()
                .enumerate()
                .map(|(i, s)| parse_script(s, &format!("parameters.ghost_scripts[{i}]")))
                .collect::<Result<_>>()?,
            Some(_) => return Err(ModelError::schema("parameters.ghost_scripts", "expected an array")),
        };
        let power_duration = doc
            .param_u64("power_duration")?
            .map(|d| d as u32)
            .unwrap_or(DEFAULT_POWER_DURATION);
        let mut task = Pacman::from_grid(&grid, scripts, power_duration)?;
        task.goal = doc.resolve_goal(&task.variables(), Self::default_goal())?;
        task.custom_goal = matches!(doc.goal, GoalSpec::Conditions(_));
        Ok(task)
    }
}
