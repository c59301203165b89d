fn main() {
    std::process::exit(dicke_reset::cli::run(std::env::args_os()));
}
