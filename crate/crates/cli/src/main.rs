use std::process::ExitCode;

use clap::Parser;
use memento_cli::{run, Cli};

#[tokio::main]
async fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    match run(cli, &mut stdout).await {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("memento: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
