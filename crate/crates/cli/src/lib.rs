//! Configuration, artifact emission and experiment orchestration for the
//! `dtasep` command-line tool.

pub mod config;
pub mod experiments;
pub mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use serde::Serialize;
use serde_json::Value;

use config::{ConfigError, RunConfig};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_RESOURCE: u8 = 2;
pub const EXIT_ACCEPTANCE: u8 = 3;

/// Exit status for a failed run.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(core) = err.downcast_ref::<dtasep_core::Error>() {
        if matches!(core, dtasep_core::Error::Resource { .. }) {
            return EXIT_RESOURCE;
        }
    }
    EXIT_VALIDATION
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputRecord {
    pub file: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub experiment: &'static str,
    pub master_seed: u64,
    pub workers: usize,
    /// Canonical text of the run configuration; feeding it back reproduces the run.
    pub config: String,
    /// The configuration file as read, if one was given.
    pub config_source: Option<String>,
    pub seeds: Value,
    pub outputs: Vec<OutputRecord>,
    pub wall_clock_seconds: f64,
}

pub struct RunReport {
    pub manifest: Manifest,
    pub output_dir: PathBuf,
    pub summary: Vec<String>,
}

fn thread_pool(workers: usize) -> anyhow::Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .context("building the worker pool")
}

/// Runs `config` and writes its artifacts plus `manifest.json` into the output directory.
pub fn run(config: &RunConfig, config_source: Option<String>) -> anyhow::Result<RunReport> {
    config.validate()?;
    let started = Instant::now();
    let outcome = thread_pool(config.workers)?.install(|| experiments::execute(config))?;
    let dir = &config.output_dir;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut outputs = Vec::new();
    for a in &outcome.artifacts {
        write(dir, &a.name, &a.bytes)?;
        outputs.push(OutputRecord {
            file: a.name.clone(),
            bytes: a.bytes.len(),
            sha256: output::content_hash(&a.bytes),
        });
    }
    let manifest = Manifest {
        tool: "dtasep",
        version: env!("CARGO_PKG_VERSION"),
        experiment: config.experiment.label(),
        master_seed: config.master_seed,
        workers: config.workers,
        config: config.canonical(),
        config_source,
        seeds: outcome.seeds,
        outputs,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    write(dir, "manifest.json", &output::json_bytes(&manifest))?;
    Ok(RunReport {
        manifest,
        output_dir: dir.clone(),
        summary: outcome.summary,
    })
}

/// Runs the acceptance criteria `ids` (all when empty), writing `verify.json`
/// when `output_dir` is given. Returns the reports and whether all passed.
pub fn verify(
    ids: &[u8],
    workers: usize,
    output_dir: Option<&Path>,
) -> anyhow::Result<(Vec<dtasep_core::acceptance::CriterionReport>, bool)> {
    if let Some(bad) = ids.iter().find(|id| !(1..=8).contains(*id)) {
        return Err(ConfigError::new("criteria", format!("{bad} is not a criterion (1 to 8)")).into());
    }
    let reports = thread_pool(workers)?.install(|| dtasep_core::acceptance::run(ids))?;
    let pass = reports.iter().all(|r| r.pass);
    if let Some(dir) = output_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        write(dir, "verify.json", &output::json_bytes(&reports))?;
    }
    Ok((reports, pass))
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> anyhow::Result<()> {
    let path = dir.join(name);
    fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))
}
