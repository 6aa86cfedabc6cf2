fn main() {
    std::process::exit(spherenav::cli::run(std::env::args_os()));
}
