fn main() {
    std::process::exit(txsim::cli::main());
}
