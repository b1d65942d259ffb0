fn main() {
    std::process::exit(treecert::cli::run(std::env::args_os()));
}
