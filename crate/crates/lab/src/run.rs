//! Executes a config and writes its artifacts.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::config::ExperimentConfig;
use crate::experiments::{execute, Ctx, Report, TaskStatus};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Overrides the config's `output_dir`.
    pub out: Option<PathBuf>,
    /// Worker threads; `None` uses every logical core.
    pub jobs: Option<usize>,
    pub no_svg: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub experiment: &'static str,
    pub config: Value,
    pub seed: u64,
    pub jobs: usize,
    pub started_at: String,
    pub finished_at: String,
    pub wall_seconds: f64,
    pub status: &'static str,
    pub tasks: Vec<TaskStatus>,
    pub outputs: Vec<String>,
}

#[derive(Debug)]
pub enum RunError {
    /// The output directory could not be created or written.
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    Pool(String),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Io { path, source } => write!(f, "cannot write {}: {source}", path.display()),
            RunError::Pool(m) => write!(f, "cannot start worker pool: {m}"),
        }
    }
}

impl std::error::Error for RunError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            RunError::Io { source, .. } => Some(source),
            RunError::Pool(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub manifest: RunManifest,
    pub report: Report,
    pub out_dir: PathBuf,
}

impl RunOutcome {
    /// True when some task failed; the outputs hold the successful ones.
    pub fn failed(&self) -> bool {
        self.report.failed()
    }
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write(path: &Path, body: &str) -> Result<(), RunError> {
    fs::write(path, body).map_err(io(path))
}

/// Runs `config`, writing every artifact into the output directory. The
/// manifest is written whether or not all tasks succeed.
pub fn run(config: &ExperimentConfig, opts: &RunOptions) -> Result<RunOutcome, RunError> {
    run_with(config, opts, execute)
}

/// [`run`] with a custom executor in place of the experiment dispatch.
pub fn run_with<F>(
    config: &ExperimentConfig,
    opts: &RunOptions,
    executor: F,
) -> Result<RunOutcome, RunError>
where
    F: FnOnce(&ExperimentConfig, &Ctx) -> Report + Send,
{
    let out_dir = opts
        .out
        .clone()
        .unwrap_or_else(|| config.output_dir.clone());
    fs::create_dir_all(&out_dir).map_err(io(&out_dir))?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = opts.jobs {
        builder = builder.num_threads(j);
    }
    let pool = builder.build().map_err(|e| RunError::Pool(e.to_string()))?;
    let jobs = pool.current_num_threads();
    let ctx = Ctx { seed: opts.seed };

    let started_at = chrono::Utc::now();
    let clock = Instant::now();
    let report = pool.install(|| executor(config, &ctx));
    let wall_seconds = clock.elapsed().as_secs_f64();
    let finished_at = chrono::Utc::now();

    let mut outputs = Vec::new();
    for t in &report.tables {
        outputs.push(t.write_csv(&out_dir).map_err(io(&out_dir))?);
    }
    let summary = serde_json::to_string_pretty(&report.summary).expect("summary serializes");
    write(&out_dir.join(SUMMARY_FILE), &(summary + "\n"))?;
    outputs.push(SUMMARY_FILE.into());
    if config.emit_svg && !opts.no_svg {
        for p in &report.plots {
            outputs.push(p.write_svg(&out_dir).map_err(io(&out_dir))?);
        }
    }
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        experiment: config.kind().name(),
        config: config.to_json(),
        seed: opts.seed,
        jobs,
        started_at: started_at.to_rfc3339(),
        finished_at: finished_at.to_rfc3339(),
        wall_seconds,
        status: if report.failed() {
            "partial_failure"
        } else {
            "ok"
        },
        tasks: report.tasks.clone(),
        outputs,
    };
    let body = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write(&out_dir.join(MANIFEST_FILE), &(body + "\n"))?;
    Ok(RunOutcome {
        manifest,
        report,
        out_dir,
    })
}

/// Process exit status for a finished run: 0 on success, 2 when the output
/// directory is unusable, 3 when a task or the worker pool failed.
pub fn exit_status(result: &Result<RunOutcome, RunError>) -> u8 {
    match result {
        Ok(o) if !o.failed() => 0,
        Ok(_) => EXIT_SOLVER,
        Err(RunError::Io { .. }) => EXIT_CONFIG,
        Err(RunError::Pool(_)) => EXIT_SOLVER,
    }
}

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;
