fn main() {
    std::process::exit(magspec::cli::run(std::env::args_os()));
}
