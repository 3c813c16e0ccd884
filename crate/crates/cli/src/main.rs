use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qgame_cli::config::Format;
use qgame_cli::{dispatch, parse_config, CliError, Command, RunConfig};

/// Quantum Prisoner's Dilemma simulator and equilibrium engine.
#[derive(Debug, Parser)]
#[command(name = "qgame", version)]
struct Args {
    /// Analysis to run.
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, env = "QGAME_OUT_DIR")]
    out: Option<PathBuf>,
    /// `csv` writes a data table and a JSON summary; `json` writes one JSON file.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Overrides every seed in the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Suppress the summary on stdout.
    #[arg(long)]
    quiet: bool,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn run(args: &Args) -> Result<(), CliError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            parse_config(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.override_seed(seed);
    }
    let format = match args.format {
        Some(FormatArg::Csv) => Format::Csv,
        Some(FormatArg::Json) => Format::Json,
        None => cfg.output.format,
    };
    let dir = args
        .out
        .clone()
        .or_else(|| cfg.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    let report = dispatch(args.command, &cfg)?;
    let written = report.write(&dir, format)?;
    if !args.quiet {
        print!("{}", report.summary_json());
        for path in written {
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qgame: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
