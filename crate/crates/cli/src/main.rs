use std::process::ExitCode;

use clap::Parser;

use dunklkit_cli::commands::{run, Command};
use dunklkit_cli::config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "dunklkit", version, about = "Rank-one Dunkl harmonic analysis toolkit")]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli.command, &cli.run) {
        Ok(out) => {
            for line in &out.summary {
                println!("{}", line);
            }
            for f in &out.files {
                println!("wrote {}", f.display());
            }
            if out.failures > 0 {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code())
        }
    }
}
