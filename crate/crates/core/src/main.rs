fn main() {
    std::process::exit(tmpa_core::cli::main());
}
