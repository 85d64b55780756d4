use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dtasep_cli::config::{Experiment, Overrides, RunConfig};
use dtasep_cli::{exit_code, EXIT_ACCEPTANCE, EXIT_OK, EXIT_VALIDATION};

/// Disordered TASEP experiments: environments, last-passage percolation,
/// coupling audits, flux plateaus and ring simulations.
#[derive(Parser)]
#[command(name = "dtasep", version)]
struct Cli {
    /// Configuration file (flat key = value text with one section per experiment).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for CSV/JSON artifacts and the manifest.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Worker threads (0 = one per core). Outputs do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Master seed from which every stream is derived.
    #[arg(long, global = true)]
    master_seed: Option<u64>,
    /// Print the resolved configuration and exit without running.
    #[arg(long, global = true)]
    dry_run: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample site rates of a disorder law.
    EnvSample,
    /// Estimate limit-shape passage times along a size ladder.
    LppTau,
    /// Audit the coupling of disordered and homogeneous weights.
    CouplingAudit,
    /// Evaluate the variational flux and the profile check on a density grid.
    Plateau,
    /// Simulate the ring flux on a density grid.
    FluxCurve,
    /// Flux curve joined with the variational flux and plateau status.
    FundamentalDiagram,
    /// Run the acceptance criteria; exits with status 3 if any fails.
    Verify {
        /// Comma-separated criterion numbers (default: all).
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u8>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Usage errors are validation failures; --help and --version are not errors.
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let experiment = match cli.command {
        Command::EnvSample => Experiment::EnvSample,
        Command::LppTau => Experiment::LppTau,
        Command::CouplingAudit => Experiment::CouplingAudit,
        Command::Plateau => Experiment::Plateau,
        Command::FluxCurve => Experiment::FluxCurve,
        Command::FundamentalDiagram => Experiment::FundamentalDiagram,
        Command::Verify { criteria } => {
            let (reports, pass) = dtasep_cli::verify(&criteria, cli.workers.unwrap_or(0), cli.output_dir.as_deref())?;
            for r in &reports {
                println!("{r}");
            }
            return Ok(if pass { EXIT_OK } else { EXIT_ACCEPTANCE });
        }
    };
    let source = match &cli.config {
        Some(path) => Some(fs::read_to_string(path).map_err(|e| anyhow::anyhow!("reading {}: {e}", path.display()))?),
        None => None,
    };
    let overrides = Overrides {
        master_seed: cli.master_seed,
        workers: cli.workers,
        output_dir: cli.output_dir,
    };
    let config = RunConfig::from_text(source.as_deref().unwrap_or(""), Some(experiment), &overrides)?;
    if cli.dry_run {
        print!("{}", config.canonical());
        return Ok(EXIT_OK);
    }
    let report = dtasep_cli::run(&config, source)?;
    for line in &report.summary {
        println!("{line}");
    }
    println!(
        "wrote {} files to {} in {:.1}s",
        report.manifest.outputs.len() + 1,
        report.output_dir.display(),
        report.manifest.wall_clock_seconds
    );
    Ok(EXIT_OK)
}
