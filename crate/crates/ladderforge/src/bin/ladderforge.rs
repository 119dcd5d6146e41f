fn main() {
    std::process::exit(ladderforge::cli::main_with_args(std::env::args_os()));
}
