fn main() {
    std::process::exit(qslprobe_cli::run(std::env::args_os()));
}
