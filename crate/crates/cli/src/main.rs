use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use plasmid_archive::codec::{Encoding, DEFAULT_PLASMID_LEN};
use plasmid_archive_cli::{cmd_decode, cmd_encode, cmd_run, Preset, RunOptions};

#[derive(Parser)]
#[command(name = "plasmid-archive", version, about = "DNA plasmid archive codec and bacterial retrieval simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a file into a manifest plus a plasmid FASTA file.
    Encode {
        input: PathBuf,
        #[arg(long, default_value = "basic")]
        encoding: Encoding,
        /// Manifest path; plasmids go next to it with a .fasta extension.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_PLASMID_LEN)]
        plasmid_len: usize,
    },
    /// Rebuild the original bytes from a manifest.
    Decode {
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an experiment preset and write its CSV.
    Run {
        #[arg(long, value_enum)]
        preset: Preset,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (default: $PLASMID_ARCHIVE_OUT, then the working directory).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Truncated grid that finishes on a laptop.
        #[arg(long)]
        desk_scale: bool,
        /// The complete retrieval grid.
        #[arg(long)]
        full: bool,
        /// Also dump agent states per event tick of the first retrieval run.
        #[arg(long)]
        trajectory: bool,
        /// TOML config layered over the preset defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Dotted overrides such as motility.D=14, applied last.
        #[arg(value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Encode { input, encoding, out, plasmid_len } => cmd_encode(&input, encoding, &out, plasmid_len)
            .map(|m| println!("encoded {} bytes into {} plasmids -> {}", m.payload_len_bytes, m.total_plasmids, out.display())),
        Command::Decode { manifest, out } => {
            cmd_decode(&manifest, &out).map(|n| println!("decoded {n} bytes -> {}", out.display()))
        }
        Command::Run { preset, seed, out, jobs, desk_scale, full, trajectory, config, overrides } => {
            let opts = RunOptions { preset, seed, out_dir: out, jobs, desk_scale, full, config, overrides, trajectory };
            cmd_run(&opts).map(|s| println!("{}", s.line))
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
