use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mlnf_verify::config::parse_config;
use mlnf_verify::suite::{list_checks, run_suite, write_outputs, RunOptions, TOOL, VERSION};

#[derive(Parser)]
#[command(name = "mlnf-verify", version, about = "Numerical checks of macroscopic-QED field identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks listed in a JSON config.
    Run {
        config: PathBuf,
        /// Output directory; overrides `output_dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads.
        #[arg(long)]
        jobs: Option<usize>,
        /// Fixed timestamps so repeated runs are byte-identical.
        #[arg(long)]
        reproducible: bool,
    },
    /// Print the available checks.
    ListChecks,
    /// Print the tool version.
    Version,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::ListChecks => {
            print!("{}", list_checks());
            ExitCode::SUCCESS
        }
        Command::Version => {
            println!("{TOOL} {VERSION}");
            ExitCode::SUCCESS
        }
        Command::Run { config, out, jobs, reproducible } => {
            let parsed = match parse_config(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let manifest = match run_suite(&parsed, &RunOptions { jobs, reproducible }) {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            for r in &manifest.reports {
                println!("{r}");
                for e in &r.errors {
                    println!("    {e}");
                }
            }
            let dir = out.or_else(|| parsed.output_dir.clone()).unwrap_or_else(|| PathBuf::from("mlnf-verify-out"));
            match write_outputs(&dir, &manifest) {
                Ok(path) => println!("manifest: {}", path.display()),
                Err(e) => {
                    eprintln!("error: cannot write {}: {e}", dir.display());
                    return ExitCode::from(2);
                }
            }
            let failed = manifest.reports.iter().filter(|r| !r.converged).count();
            if failed == 0 {
                println!("all {} checks passed", manifest.reports.len());
                ExitCode::SUCCESS
            } else {
                println!("{failed} of {} checks failed", manifest.reports.len());
                ExitCode::from(1)
            }
        }
    }
}
