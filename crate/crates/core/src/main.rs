fn main() {
    std::process::exit(semicong::cli::main_with_args(std::env::args_os()));
}
