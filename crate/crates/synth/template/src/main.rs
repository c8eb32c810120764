mod heuristic;

fn main() {
    heursynth_core::worker::run::<heursynth_core::domains::{{MODULE}}::{{TASK_TYPE}}>(heuristic::heuristic)
}
