fn main() {
    std::process::exit(heursynth::cli::main())
}
