fn main() {
    std::process::exit(hopspanner::cli::main_exit_code());
}
