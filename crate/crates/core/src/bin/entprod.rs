fn main() {
    std::process::exit(entprod::cli::run(std::env::args_os()));
}
