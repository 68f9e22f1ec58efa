fn main() {
    std::process::exit(kdvlab::cli::run(std::env::args()));
}
