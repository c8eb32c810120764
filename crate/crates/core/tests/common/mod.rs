#![allow(dead_code)]

use std::path::PathBuf;

use heursynth_core::domains::{Counters, FoCounters, Pacman, TwinPrime};
use heursynth_core::model::{Domain, InstanceDoc, PlanningTask};
use heursynth_core::TaskModel;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures/instances")
        .join(name)
}

pub fn load_fixture(name: &str) -> TaskModel {
    heursynth_core::load_instance_file(&fixture(name)).unwrap()
}

pub fn load<D: Domain>(json: &str) -> D {
    D::load(&InstanceDoc::parse_str(json).unwrap()).unwrap()
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Collects `count` states from random walks of bounded length.
pub fn random_reachable<T: PlanningTask>(task: &T, count: usize, walk_len: usize, rng: &mut StdRng) -> Vec<T::State> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut s = task.initial_state();
        out.push(s.clone());
        for _ in 0..rng.random_range(1..=walk_len) {
            let succ = task.successors(&s);
            if succ.is_empty() || out.len() >= count {
                break;
            }
            s = succ[rng.random_range(0..succ.len())].successor.clone();
            out.push(s.clone());
        }
    }
    out
}

pub fn counters(max: i64, values: &[i64]) -> Counters {
    Counters::new(max, values.to_vec()).unwrap()
}

pub fn random_counters(rng: &mut StdRng) -> Counters {
    let n = rng.random_range(1..=4);
    let max = rng.random_range(0..=6);
    let values = (0..n).map(|_| rng.random_range(0..=max)).collect();
    Counters::new(max, values).unwrap()
}

pub fn random_fo_counters(rng: &mut StdRng) -> FoCounters {
    let n = rng.random_range(1..=3);
    let max = rng.random_range(0..=8);
    let max_rate = rng.random_range(0..=2);
    let values = (0..n).map(|_| rng.random_range(0..=max)).collect();
    let rates = (0..n).map(|_| rng.random_range(0..=max_rate)).collect();
    FoCounters::new(max, max_rate, values, rates).unwrap()
}

pub fn random_twinprime(rng: &mut StdRng) -> TwinPrime {
    let k = rng.random_range(2..=3);
    let regs = (0..k).map(|_| rng.random_range(-3..=9)).collect();
    TwinPrime::new(regs, rng.random_range(0..=20)).unwrap()
}

/// Small random maze. Cells are walls with probability 0.2.
pub fn random_pacman(rng: &mut StdRng) -> Pacman {
    let rows = rng.random_range(1..=4);
    let cols = rng.random_range(2..=4);
    let mut cells: Vec<Vec<char>> = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| match rng.random_range(0..10) {
                    0 | 1 => '#',
                    2..=4 => '.',
                    5 => 'o',
                    _ => ' ',
                })
                .collect()
        })
        .collect();
    let (pr, pc) = (rng.random_range(0..rows), rng.random_range(0..cols));
    cells[pr][pc] = 'P';
    let mut scripts = Vec::new();
    if rng.random_bool(0.5) {
        let (gr, gc) = (rng.random_range(0..rows), rng.random_range(0..cols));
        if (gr, gc) != (pr, pc) {
            cells[gr][gc] = 'G';
            let len = rng.random_range(0..=4);
            scripts.push(
                (0..len)
                    .map(|_| heursynth_core::domains::Dir::ALL[rng.random_range(0..4)])
                    .collect(),
            );
        }
    }
    let grid: Vec<String> = cells.into_iter().map(|r| r.into_iter().collect()).collect();
    let refs: Vec<&str> = grid.iter().map(String::as_str).collect();
    Pacman::from_grid(&refs, scripts, rng.random_range(1..=5)).unwrap()
}
