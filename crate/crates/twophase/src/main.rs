use clap::Parser;

fn main() {
    let cli = twophase::cli::Cli::parse();
    std::process::exit(twophase::cli::run(cli));
}
