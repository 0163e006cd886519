fn main() {
    std::process::exit(wavefan::cli::main_with(std::env::args_os()));
}
