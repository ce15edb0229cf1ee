fn main() {
    std::process::exit(learnact::harness::cli(std::env::args_os()));
}
