fn main() -> std::process::ExitCode {
    penalized_kmeans::cli::main_entry()
}
