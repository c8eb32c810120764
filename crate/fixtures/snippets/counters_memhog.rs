pub fn heuristic(task: &Counters, state: &CountersState) -> f64 {
    // allocate and touch twice the worker's memory cap, taken from the command line
    let args: Vec<String> = std::env::args().collect();
    let cap: usize = args
        .iter()
        .position(|a| a == "--memory-limit")
        .and_then(|i| args.get(i + 1))
        .and_then(|s| s.parse().ok())
        .unwrap_or(1 << 30);
    let mut hog = vec![1u8; 2 * cap];
    hog[cap] = 2;
    std::hint::black_box(&hog);
    hog.len() as f64
}
