fn main() {
    std::process::exit(snlab::cli::run(std::env::args_os()));
}
