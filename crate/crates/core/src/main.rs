fn main() {
    std::process::exit(qpuiseux::cli::main_exit_code());
}
