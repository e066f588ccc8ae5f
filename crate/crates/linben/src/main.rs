fn main() {
    std::process::exit(linben::cli::run(std::env::args_os()));
}
