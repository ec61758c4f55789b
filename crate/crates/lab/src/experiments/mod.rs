//! The experiments. Each one splits into independent tasks (sweep points)
//! that run on the current rayon pool; results keep the order of the
//! parameter tuples that produced them.

pub mod anderson;
pub mod cw;
pub mod doublewell;
pub mod gap;
pub mod harmonic;
pub mod ising;
pub mod metal;
pub mod mexican;

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use ssb_core::eigensolve::{attainable_tol, SolverOptions, DEFAULT_SEED};
use ssb_core::lattice::SparseSymmetricOperator;

use crate::config::{Experiment, ExperimentConfig};
use crate::output::{Plot, Table};

/// Settings shared by every solve of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ctx {
    pub seed: u64,
}

impl Default for Ctx {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED }
    }
}

impl Ctx {
    /// Solver options at `tol` (raised to the rounding floor of `op`) and quadrature `weight`.
    pub fn solver(&self, op: &SparseSymmetricOperator, tol: f64, weight: f64) -> SolverOptions {
        SolverOptions::default()
            .with_tol(attainable_tol(op, tol))
            .with_weight(weight)
            .with_seed(self.seed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Task<T> {
    pub label: String,
    pub outcome: Result<T, String>,
    pub seconds: f64,
}

impl<T> Task<T> {
    pub fn ok(&self) -> Option<&T> {
        self.outcome.as_ref().ok()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskStatus {
    pub label: String,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub wall_seconds: f64,
}

impl<T> From<&Task<T>> for TaskStatus {
    fn from(t: &Task<T>) -> Self {
        Self {
            label: t.label.clone(),
            status: if t.outcome.is_ok() { "ok" } else { "failed" },
            error: t.outcome.as_ref().err().cloned(),
            wall_seconds: t.seconds,
        }
    }
}

/// Runs `f` over `items` on the current pool, keeping input order.
pub fn run_tasks<I, T, F>(items: Vec<(String, I)>, f: F) -> Vec<Task<T>>
where
    I: Send,
    T: Send,
    F: Fn(I) -> ssb_core::Result<T> + Sync,
{
    items
        .into_par_iter()
        .map(|(label, item)| {
            let start = Instant::now();
            let outcome = f(item).map_err(|e| e.to_string());
            Task {
                label,
                outcome,
                seconds: start.elapsed().as_secs_f64(),
            }
        })
        .collect()
}

/// Everything a run writes besides the manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub tables: Vec<Table>,
    pub summary: Value,
    pub plots: Vec<Plot>,
    pub tasks: Vec<TaskStatus>,
}

impl Report {
    pub fn failed(&self) -> bool {
        self.tasks.iter().any(|t| t.status != "ok")
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

pub(crate) fn statuses<T>(tasks: &[Task<T>]) -> Vec<TaskStatus> {
    tasks.iter().map(TaskStatus::from).collect()
}

pub(crate) fn hbar_label(h: f64) -> String {
    format!("hbar={h}")
}

/// Sorts a copy of `hbars` in descending order.
pub(crate) fn descending(hbars: &[f64]) -> Vec<f64> {
    let mut v = hbars.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Runs the configured experiment on the current rayon pool.
pub fn execute(config: &ExperimentConfig, ctx: &Ctx) -> Report {
    match &config.experiment {
        Experiment::DoublewellFlea(p) => doublewell::run(p, ctx).report(p),
        Experiment::GapScaling(p) => gap::run(p, ctx).report(p),
        Experiment::AndersonPair(p) => anderson::run(p, ctx).report(p),
        Experiment::MexicanTower(p) => mexican::run(p, ctx).report(p),
        Experiment::Metal2dFlea(p) => metal::run(p, ctx).report(p),
        Experiment::CwScan(p) => cw::run(p, ctx).report(p),
        Experiment::IsingLimits(p) => ising::run(p, ctx).report(p),
        Experiment::HarmonicOracle(p) => harmonic::run(p, ctx).report(p),
    }
}
