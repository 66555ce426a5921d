fn main() {
    std::process::exit(taut_core::cli::main());
}
