fn main() {
    std::process::exit(ratinglab::cli::run_from(std::env::args_os()));
}
