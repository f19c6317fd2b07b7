fn main() {
    std::process::exit(perfscout::cli::run());
}
