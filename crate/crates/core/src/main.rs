fn main() {
    std::process::exit(cks_toolkit::cli::run_cli(std::env::args().collect()));
}
