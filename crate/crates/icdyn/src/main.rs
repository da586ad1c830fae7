fn main() {
    std::process::exit(icdyn::cli::run());
}
