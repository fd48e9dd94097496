fn main() {
    std::process::exit(bachvol::cli::run());
}
