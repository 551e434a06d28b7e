use clap::Parser;
use hilucsi_cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
