use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use dho_cli::{execute, Cli, Status};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(outcome) => {
            let stdout = std::io::stdout();
            let stderr = std::io::stderr();
            let mut human: Box<dyn Write> = if cli.global.json { Box::new(stderr.lock()) } else { Box::new(stdout.lock()) };
            for line in &outcome.details {
                let _ = writeln!(human, "{line}");
            }
            for path in &outcome.artifacts {
                let _ = writeln!(human, "wrote {}", path.display());
            }
            let _ = writeln!(human, "{}", outcome.summary_line());
            drop(human);
            if cli.global.json {
                print!("{}", outcome.json);
            }
            match outcome.status {
                Status::Pass => ExitCode::SUCCESS,
                Status::Fail => ExitCode::from(1),
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
