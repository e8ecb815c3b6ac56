fn main() {
    std::process::exit(cohortweigh::cli::run(std::env::args_os()));
}
