fn main() {
    std::process::exit(optrec::cli::run(std::env::args_os()));
}
