pub fn heuristic(task: &Counters, state: &CountersState) -> f64 {
    panic!("no estimate for {:?}", state.values)
}
