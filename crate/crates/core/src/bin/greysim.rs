fn main() {
    std::process::exit(greysim::harness::cli::run(std::env::args_os()));
}
