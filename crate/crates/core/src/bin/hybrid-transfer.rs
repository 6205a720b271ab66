fn main() -> std::process::ExitCode {
    hybrid_transfer::cli::main()
}
