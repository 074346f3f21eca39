use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ttd_precoding::{run, OutputFormat, RunOptions, Scenario};

#[derive(Parser)]
#[command(name = "ttdsim", version = ttd_precoding::harness::VERSION, about = "Wideband THz hybrid precoding simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write its tables and manifest.
    Run {
        scenario: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let Command::Run { scenario, seed, out_dir, threads, format } = Cli::parse().command;
    let opts = RunOptions {
        seed,
        out_dir,
        threads,
        format: match format {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        },
    };
    match Scenario::from_file(&scenario).and_then(|sc| run(&sc, &opts)) {
        Ok(summary) => {
            println!("{}", summary.manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("ttdsim: {}: {e}", scenario.display());
            ExitCode::FAILURE
        }
    }
}
