fn main() {
    std::process::exit(fkloop::cli::run(std::env::args_os()));
}
