fn main() {
    std::process::exit(instructgen::cli::dispatch(std::env::args_os()));
}
