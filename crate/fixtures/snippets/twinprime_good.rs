fn nearest_twin(r: i64, threshold: i64) -> i64 {
    if r <= threshold {
        return match next_twin_prime_above(threshold) {
            Some(t) => t - r,
            None => i64::MAX,
        };
    }
    let up = next_twin_prime_above(r - 1).map_or(i64::MAX, |t| t - r);
    let mut down = i64::MAX;
    let mut p = r - 1;
    while p > threshold && r - p < up.min(1000) {
        if is_twin_prime(p) {
            down = r - p;
            break;
        }
        p -= 1;
    }
    up.min(down)
}

/// Distance from the closest register to a twin prime above the threshold.
pub fn heuristic(task: &TwinPrime, state: &TwinPrimeState) -> f64 {
    state
        .registers
        .iter()
        .map(|&r| nearest_twin(r, task.threshold))
        .min()
        .unwrap_or(i64::MAX) as f64
}
