fn main() {
    std::process::exit(lpaas::cli::run_from(std::env::args_os()));
}
