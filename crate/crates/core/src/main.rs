fn main() {
    std::process::exit(tbdist::cli::run(std::env::args_os()));
}
