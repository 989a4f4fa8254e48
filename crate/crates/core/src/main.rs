use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use twomode::runner::{run, Command};

#[derive(Parser)]
#[command(name = "twomode", version, about = "Two Josephson-coupled bosonic modes")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(clap::Args)]
struct Common {
    /// INI configuration file.
    config: PathBuf,
    /// Output directory; falls back to $OUT_DIR, then the working directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Reserved; recorded in the metadata.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Mode-b time series for each u_ab setting.
    Evolve(Common),
    /// Cat decomposition at the purification time.
    Cat(Common),
    /// Husimi function on a grid, with a packet count.
    Husimi(Common),
    /// Purity under phase damping.
    Decohere(Common),
    /// Purification times and partner amplitudes.
    Purify(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, common) = match cli.command {
        Cmd::Evolve(c) => (Command::Evolve, c),
        Cmd::Cat(c) => (Command::Cat, c),
        Cmd::Husimi(c) => (Command::Husimi, c),
        Cmd::Decohere(c) => (Command::Decohere, c),
        Cmd::Purify(c) => (Command::Purify, c),
    };
    let out = common
        .out
        .or_else(|| std::env::var_os("OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    match run(cmd, &common.config, &out, common.seed) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("twomode {}: {e}", cmd.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
