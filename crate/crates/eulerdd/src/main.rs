fn main() -> std::process::ExitCode {
    eulerdd::cli::main()
}
