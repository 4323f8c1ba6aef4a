fn main() {
    std::process::exit(redshift::cli::main_entry());
}
