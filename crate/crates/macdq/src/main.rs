fn main() {
    eprintln!("command-line interface not wired yet");
    std::process::exit(64);
}
