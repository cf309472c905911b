fn main() {
    std::process::exit(kgz::cli::run(std::env::args_os()));
}
