use std::process;

fn main() {
    process::exit(lesbar_cli::run_cli(std::env::args_os()));
}
