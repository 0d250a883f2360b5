use std::io::{self, BufWriter, Write};

use clap::Parser;

use weilbound::cli::{self, Cli};
use weilbound::Error;

fn main() {
    let cli = Cli::parse();
    let mut out = BufWriter::new(io::stdout().lock());
    let run = cli::run(cli, &mut out);
    let flush = out.flush().map_err(Error::from);
    if let Err(err) = run.and(flush) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
