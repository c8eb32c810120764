pub fn heuristic(task: &Counters, state: &CountersState) -> f64 {
    // total shortfall along the chain c0 < c1 < ...
    let v = &state.values;
    let mut h = 0i64;
    for i in 1..v.len() {
        h += (v[i - 1] + 1 - v[i]).max(0);
    }
    h as f64
}
