use clap::Parser;

fn main() {
    let cli = gpnl_cli::Cli::parse();
    std::process::exit(gpnl_cli::run(&cli));
}
