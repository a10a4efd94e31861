use std::process::ExitCode;

use clap::Parser;
use labelblind::cli::{run, Cli};
use labelblind::Error;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            println!("{}", serde_json::to_string_pretty(&out.document).expect("JSON document"));
            for f in &out.files {
                eprintln!("wrote {}", f.display());
            }
            if out.pass {
                ExitCode::SUCCESS
            } else {
                eprintln!("one or more checks failed");
                ExitCode::from(1)
            }
        }
        Err(Error::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
