mod common;

use std::collections::{HashMap, VecDeque};
use std::time::Instant;

use common::*;
use heursynth_core::domains::TwinPrime;
use heursynth_core::heuristics::hmd_for;
use heursynth_core::model::PlanningTask;
use heursynth_core::search::{bfs, bfs_traced, gbfs, gbfs_traced, Limits, Outcome};
use heursynth_core::{validate, with_task, Algorithm, HeuristicSpec, TaskModel};
use rand::Rng;

fn limits() -> Limits {
    Limits::new(30.0, 1 << 30)
}

/// Shortest plan length by explicit enumeration of `[0, max]^n`, with its
/// own move rule and goal test.
fn counters_oracle(max: i64, init: &[i64]) -> Option<usize> {
    let goal = |v: &[i64]| v.windows(2).all(|w| w[0] < w[1]);
    let mut dist: HashMap<Vec<i64>, usize> = HashMap::new();
    let mut queue = VecDeque::from([init.to_vec()]);
    dist.insert(init.to_vec(), 0);
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        if goal(&v) {
            return Some(d);
        }
        for i in 0..v.len() {
            for delta in [-1, 1] {
                let x = v[i] + delta;
                if (0..=max).contains(&x) {
                    let mut w = v.clone();
                    w[i] = x;
                    dist.entry(w.clone()).or_insert_with(|| {
                        queue.push_back(w);
                        d + 1
                    });
                }
            }
        }
    }
    None
}

#[test]
fn bfs_counters_n2_one_step() {
    assert_eq!(counters_oracle(10, &[0, 0]), Some(1));
    let model = load_fixture("counters_n2.json");
    let r = model.search(Algorithm::Bfs, &HeuristicSpec::Blind, &limits()).unwrap();
    assert_eq!(r.outcome.plan().unwrap().len(), 1);
    assert!(model.validate(r.outcome.plan().unwrap()).is_valid());
}

#[test]
fn goal_at_start_gives_empty_plan() {
    let c = counters(5, &[0, 1, 2]);
    let r = bfs(&c, &limits());
    assert_eq!(r.outcome, Outcome::Solved(vec![]));
    assert_eq!(r.stats.expanded, 1);
    let r = gbfs(&c, hmd_for(&c).unwrap(), &limits());
    assert_eq!(r.outcome, Outcome::Solved(vec![]));
}

#[test]
fn no_moves_means_exhausted() {
    let c = counters(0, &[0, 0]);
    assert_eq!(bfs(&c, &limits()).outcome, Outcome::Exhausted);
    assert_eq!(gbfs(&c, |_: &_| Ok(0.0), &limits()).outcome, Outcome::Exhausted);
}

#[test]
fn zero_heuristic_gbfs_expands_in_bfs_order() {
    for c in [counters(10, &[0, 0]), counters(3, &[0, 0, 0]), counters(4, &[4, 2, 0])] {
        let mut a = Vec::new();
        let mut b = Vec::new();
        let ra = bfs_traced(&c, &limits(), &mut |s| a.push(s.clone()));
        let rb = gbfs_traced(&c, |_: &_| Ok(0.0), &limits(), &mut |s| b.push(s.clone()));
        assert_eq!(a, b);
        assert_eq!(ra.outcome, rb.outcome);
        assert_eq!(ra.stats.expanded, rb.stats.expanded);
        assert_eq!(ra.stats.generated, rb.stats.generated);
    }
}

#[test]
fn hmd_beats_blind_on_counters_n3() {
    let c = counters(20, &[0, 0, 0]);
    let blind = bfs(&c, &limits());
    let greedy = gbfs(&c, hmd_for(&c).unwrap(), &limits());
    let plan = greedy.outcome.plan().expect("solved");
    assert!(validate(&c, plan).is_valid());
    assert!(greedy.stats.expanded <= blind.stats.expanded);
}

#[test]
fn nan_or_error_heuristic_stops_search() {
    let c = counters(10, &[0, 0]);
    let r = gbfs(&c, |_: &_| Ok(f64::NAN), &limits());
    assert!(matches!(r.outcome, Outcome::HeuristicError(_)));
    let r = gbfs(&c, |_: &_| Err("nope".to_string()), &limits());
    assert_eq!(r.outcome, Outcome::HeuristicError("nope".into()));
    // failing on a later state still reports the error
    let r = gbfs(&c, |s: &heursynth_core::domains::CountersState| {
        if s.values[0] > 0 {
            Ok(f64::NAN)
        } else {
            Ok(1.0)
        }
    }, &limits());
    assert!(matches!(r.outcome, Outcome::HeuristicError(_)));
}

#[test]
fn bfs_is_optimal_on_small_counters() {
    for n in 1..=3usize {
        for max in 0..=6i64 {
            let mut inits = vec![vec![]];
            for _ in 0..n {
                inits = inits
                    .into_iter()
                    .flat_map(|p: Vec<i64>| {
                        (0..=max).map(move |v| {
                            let mut q = p.clone();
                            q.push(v);
                            q
                        })
                    })
                    .collect();
            }
            for init in inits {
                let c = counters(max, &init);
                let r = bfs(&c, &limits());
                match (counters_oracle(max, &init), &r.outcome) {
                    (Some(d), Outcome::Solved(plan)) => assert_eq!(plan.len(), d, "{init:?} max {max}"),
                    (None, Outcome::Exhausted) => {}
                    (o, got) => panic!("{init:?} max {max}: oracle {o:?}, got {got:?}"),
                }
            }
        }
    }
}

#[test]
fn runs_are_deterministic() {
    for name in ["counters_n5.json", "fo_counters_n3.json", "pacman_5x5.json"] {
        let model = load_fixture(name);
        for (alg, h) in [(Algorithm::Bfs, HeuristicSpec::Blind), (Algorithm::Gbfs, HeuristicSpec::Hmd)] {
            let a = model.search(alg, &h, &limits()).unwrap();
            let b = model.search(alg, &h, &limits()).unwrap();
            assert_eq!(a.outcome, b.outcome, "{name}");
            let (mut sa, mut sb) = (a.stats.clone(), b.stats.clone());
            sa.elapsed_seconds = 0.0;
            sb.elapsed_seconds = 0.0;
            assert_eq!(sa, sb, "{name}");
        }
    }
}

#[test]
fn unbounded_twinprime_times_out_on_schedule() {
    let t = TwinPrime::new(vec![2, 3, 5], i64::MAX - 1).unwrap();
    let start = Instant::now();
    let r = bfs(&t, &Limits::new(2.0, 8 << 30));
    let took = start.elapsed().as_secs_f64();
    assert_eq!(r.outcome, Outcome::TimedOut);
    assert!(took <= 3.0, "{took}");
    assert!(r.stats.elapsed_seconds >= 2.0);
}

#[test]
fn memory_estimate_stops_search() {
    let t = TwinPrime::new(vec![2, 3, 5], i64::MAX - 1).unwrap();
    let r = bfs(&t, &Limits::new(60.0, 2 << 20));
    assert_eq!(r.outcome, Outcome::MemoryOut);
}

#[test]
fn expansion_cap() {
    let t = TwinPrime::new(vec![2, 3, 5], i64::MAX - 1).unwrap();
    let r = bfs(&t, &limits().with_max_expansions(500));
    assert_eq!(r.outcome, Outcome::ExpansionLimit);
    assert_eq!(r.stats.expanded, 500);
}

#[test]
fn statistics_are_consistent() {
    let c = counters(6, &[0, 0, 0]);
    let r = bfs(&c, &limits());
    assert!(r.stats.generated >= r.stats.duplicates);
    assert_eq!(r.stats.peak_closed, r.stats.expanded);
    assert!(r.stats.peak_open >= 1);
}

#[test]
fn pacman_fixtures() {
    let maze = load_fixture("pacman_5x5.json");
    let r = maze.search(Algorithm::Bfs, &HeuristicSpec::Blind, &limits()).unwrap();
    let plan = r.outcome.plan().expect("5x5 fixture is solvable");
    assert!(maze.validate(plan).is_valid());

    let trapped = load_fixture("pacman_trapped.json");
    let r = trapped.search(Algorithm::Bfs, &HeuristicSpec::Blind, &limits()).unwrap();
    assert_eq!(r.outcome, Outcome::Exhausted);
}

#[test]
fn fuzzed_plans_always_validate() {
    let mut r = rng(41);
    let lim = Limits::new(5.0, 1 << 28).with_max_expansions(20_000);
    let mut solved = 0;
    for i in 0..200 {
        let model = match i % 4 {
            0 => TaskModel::Counters(random_counters(&mut r)),
            1 => TaskModel::FoCounters(random_fo_counters(&mut r)),
            2 => TaskModel::Pacman(random_pacman(&mut r)),
            _ => TaskModel::TwinPrime(random_twinprime(&mut r)),
        };
        let blind_h = r.random_bool(0.5) || model.goal().is_empty();
        for (alg, h) in [
            (Algorithm::Bfs, HeuristicSpec::Blind),
            (Algorithm::Gbfs, if blind_h { HeuristicSpec::Blind } else { HeuristicSpec::Hmd }),
        ] {
            let res = model.search(alg, &h, &lim).unwrap();
            if let Some(plan) = res.outcome.plan() {
                solved += 1;
                let report = model.validate(plan);
                assert!(report.is_valid(), "{model:?} {alg} {h}: {report:?}");
                assert_eq!(report.trace.len(), plan.len() + 1);
            }
        }
    }
    assert!(solved > 100, "{solved}");
}

#[test]
fn initial_state_hmd_through_model() {
    with_task!(&load_fixture("counters_n3.json"), t => {
        let h = hmd_for(t).unwrap();
        assert_eq!(h(&t.initial_state()).unwrap(), 2.0);
    });
}

fn arb_counters() -> impl proptest::strategy::Strategy<Value = (i64, Vec<i64>)> {
    use proptest::prelude::*;
    (1usize..=4, 0i64..=7).prop_flat_map(|(n, max)| (Just(max), proptest::collection::vec(0..=max, n)))
}

proptest::proptest! {
    #[test]
    fn bfs_is_shortest_and_greedy_plans_validate((max, values) in arb_counters()) {
        let c = counters(max, &values);
        let shortest = counters_oracle(max, &values);
        let blind = bfs(&c, &limits());
        // a single counter has an empty goal, which h^md rejects
        let greedy = match hmd_for(&c) {
            Ok(h) => gbfs(&c, h, &limits()),
            Err(_) => gbfs(&c, |_: &_| Ok(0.0), &limits()),
        };
        match shortest {
            Some(len) => {
                let b = blind.outcome.plan().expect("bfs solves");
                let g = greedy.outcome.plan().expect("gbfs solves");
                proptest::prop_assert_eq!(b.len(), len);
                proptest::prop_assert!(g.len() >= len);
                proptest::prop_assert!(validate(&c, b).is_valid());
                proptest::prop_assert!(validate(&c, g).is_valid());
            }
            None => {
                proptest::prop_assert_eq!(&blind.outcome, &Outcome::Exhausted);
                proptest::prop_assert_eq!(&greedy.outcome, &Outcome::Exhausted);
            }
        }
        proptest::prop_assert!(blind.stats.duplicates <= blind.stats.generated);
    }
}
