fn main() {
    std::process::exit(shiftlab::run(std::env::args_os()));
}
