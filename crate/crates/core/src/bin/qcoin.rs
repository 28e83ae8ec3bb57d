fn main() {
    std::process::exit(qcoin::cli::main_with_args(std::env::args_os()));
}
