fn main() {
    std::process::exit(ptscatter::cli::run(std::env::args_os()));
}
