fn main() {
    std::process::exit(neurashed::cli::dispatch(std::env::args()));
}
