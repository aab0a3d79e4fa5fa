use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use semicz_cli::{run, CliError, Config, SCHEMA};

#[derive(Parser)]
#[command(name = "semicz", version, about = "Numerical experiments for semicommutative Calderón–Zygmund theory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON configuration.
    Run { config: PathBuf },
    /// Check a configuration without running it.
    Validate { config: PathBuf },
    /// Print the configuration JSON Schema.
    Schema,
    /// Print the version.
    Version,
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Run { config } => {
            let config = Config::load(&config)?;
            let outcome = run(&config)?;
            let s = &outcome.summary_data;
            println!(
                "{}: {} rows, C_emp = {:.6e} ({}), violations = {}",
                s.experiment, s.rows, s.c_emp, s.headline, s.violations
            );
            if let Some(st) = &s.stability {
                println!("refinement: {:.6e} -> {:.6e} (ratio {:.4})", st.coarse, st.fine, st.ratio);
            }
            println!("report: {}", outcome.report.display());
            println!("summary: {}", outcome.summary.display());
            for p in &outcome.plots {
                println!("plot: {}", p.display());
            }
            Ok(outcome.exit_code())
        }
        Command::Validate { config } => {
            Config::load(&config)?;
            println!("ok");
            Ok(0)
        }
        Command::Schema => {
            print!("{SCHEMA}");
            Ok(0)
        }
        Command::Version => {
            println!("semicz {}", env!("CARGO_PKG_VERSION"));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
