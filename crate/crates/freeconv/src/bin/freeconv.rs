fn main() {
    eprintln!("command layer not wired yet");
    std::process::exit(4);
}
