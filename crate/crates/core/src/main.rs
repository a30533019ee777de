fn main() {
    std::process::exit(qscissors::cli::run());
}
