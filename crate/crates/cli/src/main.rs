use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use qip::harness::Mode;
use qip_cli::{Overrides, ProtocolName};

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum ModeArg {
    Ideal,
    Sampled,
}

/// Runs interactive-proof experiments and writes reports.
#[derive(Debug, Parser)]
#[command(name = "qip", version)]
struct Cli {
    /// Protocol to run.
    #[arg(value_enum)]
    protocol: ProtocolName,

    /// Flat key-value TOML file; its values override the flags below.
    #[arg(long)]
    config: Option<PathBuf>,

    #[arg(long)]
    trials: Option<usize>,

    #[arg(long)]
    seed: Option<u64>,

    #[arg(long, value_enum)]
    mode: Option<ModeArg>,

    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Write one transcript file per trial.
    #[arg(long)]
    transcripts: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let flags = Overrides {
        trials: cli.trials,
        seed: cli.seed,
        mode: cli.mode.map(|m| match m {
            ModeArg::Ideal => Mode::Ideal,
            ModeArg::Sampled => Mode::Sampled,
        }),
        output_dir: cli.out,
        transcripts: cli.transcripts,
    };
    let (code, message) = qip_cli::execute(cli.protocol, cli.config.as_deref(), &flags);
    if code == 0 {
        println!("{message}");
    } else {
        eprintln!("error: {message}");
    }
    ExitCode::from(code as u8)
}
