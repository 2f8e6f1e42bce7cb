use clap::Parser;

fn main() {
    std::process::exit(raz_cli::run(raz_cli::Cli::parse()));
}
