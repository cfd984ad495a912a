fn main() {
    std::process::exit(svqoi::cli::run(std::env::args_os()));
}
