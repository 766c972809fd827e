fn main() {
    std::process::exit(cyclosum_cli::run(std::env::args()));
}
