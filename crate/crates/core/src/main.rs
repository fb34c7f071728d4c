fn main() {
    std::process::exit(polycon::cli::run_main());
}
