fn main() {
    std::process::exit(mos::cli::run(std::env::args_os()));
}
