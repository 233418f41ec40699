fn main() {
    std::process::exit(painleve::main_with(std::env::args_os()));
}
