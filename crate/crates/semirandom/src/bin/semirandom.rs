fn main() {
    std::process::exit(semirandom::cli::dispatch(std::env::args()));
}
