use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cqed_vacua::cli::{load_config, run};

#[derive(Parser)]
#[command(name = "cqed-vacua", version, about = "Ground-state tools for flux-qubit chains coupled to a transmission line")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base seed for randomized start vectors and disorder draws.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output directory (default: $CQED_VACUA_OUT, then ./cqed-out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Config override, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Circuit constants from raw element values.
    Derive,
    /// Fluxonium levels, transition frequency and dipole element.
    Fluxonium,
    /// Single-mode polariton branches over a coupling grid.
    Polariton,
    /// Lowest many-body eigenvalues.
    Spectrum,
    /// Ground-doublet splitting over a g grid.
    SplittingSweep,
    /// Fidelity of the numerical ground doublet with the coherent-state pair.
    Overlap,
    /// Splitting statistics under random qubit frequencies.
    Disorder,
    /// Exponent fit of ln(delta) against g^2 from a sweep table.
    FitBeta,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Derive => "derive",
            Command::Fluxonium => "fluxonium",
            Command::Polariton => "polariton",
            Command::Spectrum => "spectrum",
            Command::SplittingSweep => "splitting-sweep",
            Command::Overlap => "overlap",
            Command::Disorder => "disorder",
            Command::FitBeta => "fit-beta",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut overrides = Vec::new();
    if let Some(seed) = cli.seed {
        overrides.push(format!("seed = {seed}"));
    }
    if let Some(jobs) = cli.jobs {
        overrides.push(format!("jobs = {jobs}"));
    }
    if let Some(out) = &cli.out {
        overrides.push(format!("output_dir = {:?}", out.display().to_string()));
    }
    overrides.extend(cli.set.iter().cloned());
    let outcome = load_config(cli.config.as_deref(), &overrides)
        .and_then(|cfg| run(cli.command.name(), &cfg));
    match outcome {
        Ok(o) => {
            for w in &o.warnings {
                eprintln!("warning: {w}");
            }
            for f in &o.files {
                println!("{}", f.display());
            }
            if o.success() {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: {} sub-task(s) failed", o.failures);
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
