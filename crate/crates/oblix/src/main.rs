use clap::Parser;

use oblix::cli::{main_impl, Cli};

fn main() {
    let cli = Cli::parse();
    std::process::exit(main_impl(&cli));
}
