pub fn heuristic(task: &Counters, state: &CountersState) -> f64 {
    std::process::abort()
}
