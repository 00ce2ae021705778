fn main() {
    std::process::exit(nichepop::harness::cli::cli_main(std::env::args_os()));
}
