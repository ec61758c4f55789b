//! The symmetry-breaking pair `(psi0 ± psi1)/sqrt(2)` of the double well.

use serde_json::json;

use ssb_core::lattice::{assemble_hamiltonian, Grid, SparseSymmetricOperator};
use ssb_core::potentials::PotentialSpec;
use ssb_core::semiclassics::{anderson_pair, half_space_mass, husimi};

use super::doublewell::{phase_grid, symmetric_pair};
use super::{hbar_label, run_tasks, statuses, Ctx, Report, Task};
use crate::config::AndersonParams;
use crate::output::{Plot, Series, Table};

#[derive(Debug, Clone, PartialEq)]
pub struct PairState {
    pub label: &'static str,
    pub energy: f64,
    /// Husimi mass at `q > 0`.
    pub husimi_right: f64,
    pub husimi_mass: f64,
    pub psi: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AndersonResult {
    pub hbar: f64,
    pub e0: f64,
    pub e1: f64,
    /// Certified residual bound of the eigenpairs, `tol * max(1, |E|)`.
    pub tolerance: f64,
    pub states: [PairState; 2],
}

impl AndersonResult {
    pub fn target(&self) -> f64 {
        0.5 * (self.e0 + self.e1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AndersonOutcome {
    pub task: Task<AndersonResult>,
    pub grid: Grid,
}

fn energy(op: &SparseSymmetricOperator, psi: &[f64], weight: f64) -> f64 {
    let mut hpsi = vec![0.0; psi.len()];
    op.apply(psi, &mut hpsi);
    psi.iter().zip(&hpsi).map(|(a, b)| a * b).sum::<f64>() * weight
}

pub fn run(p: &AndersonParams, ctx: &Ctx) -> AndersonOutcome {
    let grid = p.grid.build().expect("validated grid");
    let mut tasks = run_tasks(vec![(hbar_label(p.hbar), p.hbar)], |hbar| {
        let op = assemble_hamiltonian(&grid, hbar, &PotentialSpec::DoubleWell, None)?;
        let opts = ctx.solver(&op, p.tol, grid.weight());
        let (even, odd) = symmetric_pair(&op, &grid, &opts)?;
        let (e0, e1) = (even.eigenvalues[0], odd.eigenvalues[0]);
        let w = grid.weight();
        let (plus, minus) = anderson_pair(&even.eigenvectors[0], &odd.eigenvectors[0], w)?;
        let phase = phase_grid(hbar, p.phase_nodes)?;
        let state = |label: &'static str, psi: Vec<f64>| -> ssb_core::Result<PairState> {
            let field = husimi(&psi, &grid, hbar, &phase)?;
            Ok(PairState {
                label,
                energy: energy(&op, &psi, w),
                husimi_right: half_space_mass(&field, 0, 0.0)?,
                husimi_mass: field.mass,
                psi,
            })
        };
        Ok(AndersonResult {
            hbar,
            e0,
            e1,
            tolerance: opts.tol * e0.abs().max(e1.abs()).max(1.0),
            states: [state("plus", plus)?, state("minus", minus)?],
        })
    });
    AndersonOutcome {
        task: tasks.remove(0),
        grid,
    }
}

impl AndersonOutcome {
    pub fn report(&self, p: &AndersonParams) -> Report {
        let mut t = Table::new(
            "anderson_pair",
            &[
                "hbar",
                "x_min",
                "x_max",
                "nodes",
                "state",
                "e0",
                "e1",
                "energy",
                "target",
                "energy_error",
                "tolerance",
                "husimi_right",
                "localized_mass",
                "husimi_mass",
            ],
        );
        let mut series = Vec::new();
        if let Some(r) = self.task.ok() {
            for s in &r.states {
                t.push(vec![
                    r.hbar.into(),
                    p.grid.x_min.into(),
                    p.grid.x_max.into(),
                    p.grid.nodes.into(),
                    s.label.into(),
                    r.e0.into(),
                    r.e1.into(),
                    s.energy.into(),
                    r.target().into(),
                    (s.energy - r.target()).abs().into(),
                    r.tolerance.into(),
                    s.husimi_right.into(),
                    s.husimi_right.max(1.0 - s.husimi_right).into(),
                    s.husimi_mass.into(),
                ]);
                series.push(Series {
                    label: s.label.into(),
                    points: (0..self.grid.len())
                        .map(|i| (self.grid.point(i)[0], s.psi[i] * s.psi[i]))
                        .collect(),
                });
            }
        }
        let summary = match self.task.ok() {
            Some(r) => json!({
                "experiment": "anderson_pair",
                "hbar": r.hbar,
                "e0": r.e0,
                "e1": r.e1,
                "gap": r.e1 - r.e0,
                "localized_mass": r.states.iter().map(|s| s.husimi_right.max(1.0 - s.husimi_right)).collect::<Vec<_>>(),
                "energy_error": r.states.iter().map(|s| (s.energy - r.target()).abs()).collect::<Vec<_>>(),
                "tolerance": r.tolerance,
            }),
            None => {
                json!({"experiment": "anderson_pair", "error": self.task.outcome.as_ref().err()})
            }
        };
        Report {
            tables: vec![t],
            summary,
            plots: vec![Plot::Lines {
                name: "anderson_pair".into(),
                title: "Symmetry-breaking pair".into(),
                x_label: "x".into(),
                y_label: "|psi|^2".into(),
                log_y: false,
                series,
            }],
            tasks: statuses(std::slice::from_ref(&self.task)),
        }
    }
}
