use clap::Parser;

fn main() {
    let cli = sauter_cli::Cli::parse();
    std::process::exit(sauter_cli::execute(&cli));
}
