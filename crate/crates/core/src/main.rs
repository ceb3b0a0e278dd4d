fn main() {
    std::process::exit(shocklab::cli::run(std::env::args_os()));
}
