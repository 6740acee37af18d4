fn main() {
    std::process::exit(cashsub::cli::main_with_args(std::env::args_os()));
}
