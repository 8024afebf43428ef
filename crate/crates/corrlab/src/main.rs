fn main() {
    std::process::exit(corrlab::cli::main_entry());
}
