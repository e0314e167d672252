fn main() {
    std::process::exit(dispersive_core::cli::main());
}
