fn main() {
    std::process::exit(leomec::cli::run(std::env::args_os()));
}
