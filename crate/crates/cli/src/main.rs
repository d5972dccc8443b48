fn main() {
    std::process::exit(perispec_cli::main_entry());
}
