use clap::Parser;

use ptwitness::cli::{configure_threads, run, RunConfig};

fn main() {
    let cfg = RunConfig::parse();
    configure_threads();
    match run(&cfg) {
        Ok(out) => print!("{out}"),
        Err(e) => {
            eprintln!("ptwitness: {}", e.message);
            std::process::exit(e.code);
        }
    }
}
