fn main() {
    std::process::exit(rep_market::cli::run(std::env::args_os()));
}
