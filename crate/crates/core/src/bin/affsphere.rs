fn main() {
    std::process::exit(affsphere::cli::run());
}
