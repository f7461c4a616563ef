use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser};
use darkstate::liouvillian::Storage;
use darkstate_cli::config::load_config;
use darkstate_cli::run::{apply_overrides, run, Overrides, RunError, EXIT_CODES_HELP};

/// Spectra, dynamics and uniqueness checks for Lindblad processes with a
/// designed dark state.
#[derive(Parser, Debug)]
#[command(name = "darkstate", version, after_help = EXIT_CODES_HELP)]
#[command(group(ArgGroup::new("storage").args(["dense", "sparse"])))]
struct Cli {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Verification tolerance, overriding `task.tol`.
    #[arg(long)]
    tol: Option<f64>,
    /// Force dense superoperators.
    #[arg(long)]
    dense: bool,
    /// Force sparse superoperators.
    #[arg(long)]
    sparse: bool,
    /// Seed, overriding `task.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, overriding `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let storage = match (cli.dense, cli.sparse) {
        (true, _) => Storage::Dense,
        (_, true) => Storage::Sparse,
        _ => Storage::Auto,
    };
    let ov = Overrides {
        tol: cli.tol,
        seed: cli.seed,
        out: cli.out.clone(),
    };
    let result = load_config(&cli.config)
        .and_then(|v| apply_overrides(v, &ov))
        .map_err(RunError::from)
        .and_then(|v| {
            // config-relative output unless given on the command line
            let base = match &cli.out {
                Some(_) => Path::new("."),
                None => cli.config.parent().unwrap_or(Path::new(".")),
            };
            run(&v, storage, base)
        });
    match result {
        Ok(outcome) => {
            for line in &outcome.summary {
                println!("{line}");
            }
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("darkstate: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
