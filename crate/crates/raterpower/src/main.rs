fn main() -> std::process::ExitCode {
    raterpower::cli::main()
}
