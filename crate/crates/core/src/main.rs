fn main() {
    std::process::exit(fixlogic::run());
}
