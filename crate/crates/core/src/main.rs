fn main() {
    std::process::exit(he_qubit::cli::main_from_args(std::env::args_os()));
}
