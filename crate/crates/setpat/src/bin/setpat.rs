fn main() {
    std::process::exit(setpat::cli::run());
}
