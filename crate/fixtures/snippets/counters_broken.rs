pub fn heuristic(task: &Counters, state: &CountersState) -> f64 {
    let total: i64 = state.values.iter().sum()
    total as f64
}
