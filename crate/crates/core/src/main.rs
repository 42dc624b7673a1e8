use clap::Parser;
use toda_connect::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let outcome = run(cli);
    println!("{}", outcome.payload);
    std::process::exit(outcome.exit_code);
}
