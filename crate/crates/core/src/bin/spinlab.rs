fn main() {
    std::process::exit(spinlab::cli::main_exit_code());
}
