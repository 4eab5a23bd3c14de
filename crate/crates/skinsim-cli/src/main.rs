use std::process::ExitCode;

fn main() -> ExitCode {
    skinsim_cli::main_entry()
}
