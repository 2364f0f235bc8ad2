fn main() {
    std::process::exit(covfit::cli::run());
}
