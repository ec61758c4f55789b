//! Harmonic oscillator reference: ground energy and Husimi density against
//! closed forms.

use serde_json::json;

use ssb_core::eigensolve::lowest_k_with;
use ssb_core::lattice::assemble_hamiltonian;
use ssb_core::potentials::PotentialSpec;
use ssb_core::semiclassics::{husimi, PhaseGrid};

use super::{hbar_label, run_tasks, statuses, Ctx, Report, Task};
use crate::config::HarmonicParams;
use crate::output::{Plot, Table};

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicResult {
    pub e0: f64,
    /// `hbar * omega / sqrt(2)`.
    pub e0_exact: f64,
    pub e0_rel_error: f64,
    /// `max |Q(q, p) - exp(-(q^2 + p^2) / (2 hbar))|` over the phase grid.
    pub husimi_max_error: f64,
    pub husimi_mass: f64,
    pub density: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicOutcome {
    pub task: Task<HarmonicResult>,
}

pub fn reference_husimi(q: f64, p: f64, hbar: f64) -> f64 {
    (-(q * q + p * p) / (2.0 * hbar)).exp()
}

pub fn run(p: &HarmonicParams, ctx: &Ctx) -> HarmonicOutcome {
    let grid = p.grid.build().expect("validated grid");
    let mut tasks = run_tasks(vec![(hbar_label(p.hbar), p.hbar)], |hbar| {
        let spec = PotentialSpec::Harmonic { omega: p.omega };
        let op = assemble_hamiltonian(&grid, hbar, &spec, None)?;
        let s = lowest_k_with(&op, 1, &ctx.solver(&op, p.tol, grid.weight()))?;
        let phase = PhaseGrid::square_1d(p.phase_min, p.phase_max, p.phase_nodes)?;
        let field = husimi(&s.eigenvectors[0], &grid, hbar, &phase)?;
        let husimi_max_error = field
            .density
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let (q, pp) = phase.point(i);
                (v - reference_husimi(q[0], pp[0], hbar)).abs()
            })
            .fold(0.0, f64::max);
        let e0 = s.eigenvalues[0];
        let e0_exact = hbar * p.omega / std::f64::consts::SQRT_2;
        Ok(HarmonicResult {
            e0,
            e0_exact,
            e0_rel_error: ((e0 - e0_exact) / e0_exact).abs(),
            husimi_max_error,
            husimi_mass: field.mass,
            density: field.density,
        })
    });
    HarmonicOutcome {
        task: tasks.remove(0),
    }
}

impl HarmonicOutcome {
    pub fn report(&self, p: &HarmonicParams) -> Report {
        let mut t = Table::new(
            "harmonic",
            &[
                "hbar",
                "omega",
                "x_min",
                "x_max",
                "nodes",
                "phase_min",
                "phase_max",
                "phase_nodes",
                "e0",
                "e0_exact",
                "e0_rel_error",
                "husimi_max_error",
                "husimi_mass",
            ],
        );
        let mut plots = Vec::new();
        let summary = match self.task.ok() {
            Some(r) => {
                t.push(vec![
                    p.hbar.into(),
                    p.omega.into(),
                    p.grid.x_min.into(),
                    p.grid.x_max.into(),
                    p.grid.nodes.into(),
                    p.phase_min.into(),
                    p.phase_max.into(),
                    p.phase_nodes.into(),
                    r.e0.into(),
                    r.e0_exact.into(),
                    r.e0_rel_error.into(),
                    r.husimi_max_error.into(),
                    r.husimi_mass.into(),
                ]);
                plots.push(Plot::Heatmap {
                    name: "husimi".into(),
                    title: format!("Husimi density, hbar = {}, omega = {}", p.hbar, p.omega),
                    values: r.density.clone(),
                    nx: p.phase_nodes,
                    ny: p.phase_nodes,
                    extent: [p.phase_min, p.phase_max, p.phase_min, p.phase_max],
                });
                json!({
                    "experiment": "harmonic_oracle",
                    "e0": r.e0,
                    "e0_exact": r.e0_exact,
                    "e0_rel_error": r.e0_rel_error,
                    "husimi_max_error": r.husimi_max_error,
                    "husimi_mass": r.husimi_mass,
                })
            }
            None => {
                json!({"experiment": "harmonic_oracle", "error": self.task.outcome.as_ref().err()})
            }
        };
        Report {
            tables: vec![t],
            summary,
            plots,
            tasks: statuses(std::slice::from_ref(&self.task)),
        }
    }
}
