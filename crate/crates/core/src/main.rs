use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use lcs_cohomology::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (value, code) = match run(&cli) {
        Ok(v) => (v, 0),
        Err(f) => (f.to_json(), f.code),
    };
    let text = serde_json::to_string_pretty(&value).expect("serializable");
    match (&cli.json_out, code) {
        (Some(path), 0) => {
            if let Err(e) = std::fs::write(path, text + "\n") {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        // A closed pipe is not worth a panic.
        _ => {
            let _ = writeln!(std::io::stdout(), "{text}");
        }
    }
    ExitCode::from(code as u8)
}
