mod common;

use common::*;
use heursynth_core::heuristics::{condition_distance, h_blind, h_md, hmd_for, CompiledGoal};
use heursynth_core::model::{Cmp, Expr, Fluents, GoalCondition, PlanningTask, Value};
use heursynth_core::TaskModel;
use rand::Rng;

fn state(pairs: &[(&str, Value)]) -> Fluents {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

#[test]
fn distance_examples() {
    let x = state(&[("x", Value::Int(4))]);
    let c = GoalCondition::relation(Expr::var("x"), Cmp::Ge, Expr::Const(10.0));
    assert_eq!(condition_distance(&c, &x).unwrap(), 6.0);

    let x13 = state(&[("x", Value::Int(13))]);
    let c = GoalCondition::relation(Expr::var("x"), Cmp::Eq, Expr::Const(10.0));
    assert_eq!(condition_distance(&c, &x13).unwrap(), 3.0);

    let done = state(&[("done", Value::Bool(false))]);
    assert_eq!(condition_distance(&GoalCondition::prop("done", true), &done).unwrap(), 1.0);
    assert_eq!(condition_distance(&GoalCondition::prop("done", false), &done).unwrap(), 0.0);
}

#[test]
fn hmd_examples() {
    let s = state(&[("x", Value::Int(4)), ("done", Value::Bool(false))]);
    let goal = [
        GoalCondition::relation(Expr::var("x"), Cmp::Ge, Expr::Const(10.0)),
        GoalCondition::prop("done", true),
    ];
    assert_eq!(h_md(&s, &goal).unwrap(), 7.0);

    let c = counters(10, &[0, 0, 0]);
    let h = hmd_for(&c).unwrap();
    assert_eq!(h(&c.initial_state()).unwrap(), 2.0);
    assert_eq!(h_blind(&c.initial_state()), 0.0);
}

#[test]
fn hmd_needs_goal() {
    let c = counters(3, &[1]);
    assert!(c.goal().is_empty());
    assert!(hmd_for(&c).is_err());
}

#[test]
fn strict_comparator_has_zero_distance_at_boundary() {
    let s = state(&[("x", Value::Int(10))]);
    let c = GoalCondition::relation(Expr::var("x"), Cmp::Gt, Expr::Const(10.0));
    assert!(!c.check(&s).unwrap());
    assert_eq!(condition_distance(&c, &s).unwrap(), 0.0);
}

#[test]
fn errors_propagate() {
    let s = state(&[("x", Value::Int(0))]);
    let c = GoalCondition::relation(Expr::div(Expr::Const(1.0), Expr::var("x")), Cmp::Ge, Expr::Const(0.0));
    assert!(condition_distance(&c, &s).is_err());
    let c = GoalCondition::relation(Expr::var("y"), Cmp::Ge, Expr::Const(0.0));
    assert!(condition_distance(&c, &s).is_err());
}

/// inf over y in a box of |psi(y) - psi(s)| subject to psi(y) cmp 0, by
/// repeated grid refinement around the best point found so far.
fn grid_oracle(a: f64, b: f64, c: f64, cmp: Cmp, s: (f64, f64)) -> f64 {
    let psi = |x: f64, y: f64| a * x + b * y + c;
    let target = psi(s.0, s.1);
    let (mut cx, mut cy, mut half) = (0.0, 0.0, 200.0);
    let k = 100;
    let mut best = f64::INFINITY;
    for _ in 0..60 {
        let step = 2.0 * half / k as f64;
        let slack = (a.abs() + b.abs()) * step;
        let mut arg = (cx, cy);
        for i in 0..=k {
            for j in 0..=k {
                let (x, y) = (cx - half + i as f64 * step, cy - half + j as f64 * step);
                let v = psi(x, y);
                let feasible = match cmp {
                    Cmp::Eq => v.abs() <= slack,
                    _ => cmp.holds(v, 0.0),
                };
                if feasible {
                    let d = match cmp {
                        // the equality slack is charged to the oracle so it converges from above
                        Cmp::Eq => (target - v).abs() + v.abs(),
                        _ => (v - target).abs(),
                    };
                    if d < best {
                        best = d;
                        arg = (x, y);
                    }
                }
            }
        }
        (cx, cy) = arg;
        half = 4.0 * step;
    }
    best
}

#[test]
fn distance_matches_grid_oracle() {
    let mut r = rng(7);
    let cmps = [Cmp::Ge, Cmp::Gt, Cmp::Le, Cmp::Lt, Cmp::Eq];
    for case in 0..50 {
        let a = r.random_range(-5.0..5.0);
        let b = r.random_range(-5.0..5.0);
        let c = r.random_range(-50.0..50.0);
        let cmp = cmps[case % cmps.len()];
        let s = (r.random_range(-20..=20) as f64, r.random_range(-20..=20) as f64);
        let psi = Expr::add(
            Expr::add(Expr::mul(Expr::Const(a), Expr::var("x")), Expr::mul(Expr::Const(b), Expr::var("y"))),
            Expr::Const(c),
        );
        let cond = GoalCondition::numeric(psi, cmp);
        let fl = state(&[("x", Value::Real(s.0)), ("y", Value::Real(s.1))]);
        let got = condition_distance(&cond, &fl).unwrap();
        let want = grid_oracle(a, b, c, cmp, s);
        assert!((got - want).abs() <= 1e-6, "case {case}: {a}x+{b}y+{c} {cmp:?} at {s:?}: {got} vs {want}");
    }
}

#[test]
fn hmd_zero_implies_goal_and_is_nonnegative() {
    let mut r = rng(99);
    let mut zeros = 0;
    for i in 0..120 {
        let model = match i % 3 {
            0 => TaskModel::Counters(random_counters(&mut r)),
            1 => TaskModel::FoCounters(random_fo_counters(&mut r)),
            _ => TaskModel::Pacman(random_pacman(&mut r)),
        };
        if model.goal().is_empty() {
            continue;
        }
        heursynth_core::with_task!(&model, t => {
            assert!(t.goal().iter().all(|g| !g.uses_strict_comparator()));
            let h = hmd_for(t).unwrap();
            for s in random_reachable(t, 200, 40, &mut r) {
                let v = h(&s).unwrap();
                assert!(v >= 0.0);
                if v == 0.0 {
                    zeros += 1;
                    assert!(t.is_goal(&s), "{s:?}");
                }
            }
        });
    }
    assert!(zeros > 0);
}

#[test]
fn fluent_values_follow_variable_order() {
    let mut r = rng(5);
    for i in 0..80 {
        let model = match i % 4 {
            0 => TaskModel::Counters(random_counters(&mut r)),
            1 => TaskModel::FoCounters(random_fo_counters(&mut r)),
            2 => TaskModel::TwinPrime(random_twinprime(&mut r)),
            _ => TaskModel::Pacman(random_pacman(&mut r)),
        };
        heursynth_core::with_task!(&model, t => {
            let vars = t.variables();
            for s in random_reachable(t, 30, 20, &mut r) {
                let f = t.fluents(&s);
                let v = t.fluent_values(&s);
                assert_eq!(v.len(), vars.len());
                for (name, value) in vars.iter().zip(&v) {
                    assert!(f[name].bit_eq(value), "{name}: {:?} vs {value:?}", f[name]);
                }
            }
        });
    }
}

fn random_expr(r: &mut impl Rng, depth: u32) -> Expr {
    if depth == 0 || r.random_bool(0.3) {
        return match r.random_range(0..3) {
            0 => Expr::Const(r.random_range(-10..=10) as f64),
            1 => Expr::var("x"),
            _ => Expr::var("y"),
        };
    }
    let (a, b) = (random_expr(r, depth - 1), random_expr(r, depth - 1));
    match r.random_range(0..4) {
        0 => Expr::add(a, b),
        1 => Expr::sub(a, b),
        2 => Expr::mul(a, b),
        _ => Expr::div(a, b),
    }
}

#[test]
fn compiled_goal_agrees_with_fluent_map() {
    let mut r = rng(11);
    let vars = vec!["x".to_string(), "y".to_string(), "done".to_string()];
    let cmps = [Cmp::Ge, Cmp::Gt, Cmp::Le, Cmp::Lt, Cmp::Eq];
    for _ in 0..400 {
        let mut goal = vec![GoalCondition::prop("done", r.random_bool(0.5))];
        for _ in 0..r.random_range(1..4) {
            goal.push(GoalCondition::numeric(random_expr(&mut r, 3), cmps[r.random_range(0..cmps.len())]));
        }
        let compiled = CompiledGoal::new(&goal, &vars);
        for _ in 0..10 {
            let values = vec![
                Value::Int(r.random_range(-5..=5)),
                Value::Real(r.random_range(-5.0..5.0)),
                Value::Bool(r.random_bool(0.5)),
            ];
            let map: Fluents = vars.iter().cloned().zip(values.iter().cloned()).collect();
            match (h_md(&map, &goal), compiled.h_md(&values)) {
                (Ok(a), Ok(b)) => assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "{goal:?}: {a} vs {b}"),
                (Err(_), Err(_)) => {}
                (a, b) => panic!("{goal:?} at {values:?}: {a:?} vs {b:?}"),
            }
        }
    }
}
