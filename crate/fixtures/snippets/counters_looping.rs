pub fn heuristic(task: &Counters, state: &CountersState) -> f64 {
    let mut x = state.values.len() as u64;
    loop {
        x = std::hint::black_box(x.wrapping_mul(6364136223846793005).wrapping_add(1));
    }
}
