fn main() {
    let (out, code) = hdescent::cli::run(std::env::args_os());
    println!("{out}");
    std::process::exit(code);
}
