fn main() {
    let code = pmssa::cli::run(std::env::args_os());
    pmssa::cli::flush();
    std::process::exit(code);
}
