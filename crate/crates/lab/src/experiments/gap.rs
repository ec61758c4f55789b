//! Tunnel splitting of the symmetric double well and its fit against `1/hbar`.

use serde_json::json;

use ssb_core::eigensolve::{gap_row, GapProblem, GapRow, GapScaling};
use ssb_core::lattice::assemble_hamiltonian;
use ssb_core::potentials::PotentialSpec;

use super::{descending, hbar_label, run_tasks, statuses, Ctx, Report, Task};
use crate::config::GapParams;
use crate::output::{Plot, Series, Table};

#[derive(Debug, Clone, PartialEq)]
pub struct GapOutcome {
    pub tasks: Vec<Task<GapRow>>,
    /// Fits over the successful rows.
    pub scaling: GapScaling,
}

pub fn run(p: &GapParams, ctx: &Ctx) -> GapOutcome {
    let grid = p.grid.build().expect("validated grid");
    let items = descending(&p.hbars)
        .into_iter()
        .map(|h| (hbar_label(h), h))
        .collect();
    let tasks = run_tasks(items, |hbar| {
        let op = assemble_hamiltonian(&grid, hbar, &PotentialSpec::DoubleWell, None)?;
        let opts = ctx.solver(&op, p.tol, grid.weight());
        let problem = GapProblem {
            reflection: Some(grid.reflection(0)?),
            op,
        };
        gap_row(hbar, &problem, &opts)
    });
    let scaling = GapScaling::from_rows(tasks.iter().filter_map(|t| t.ok().copied()).collect());
    GapOutcome { tasks, scaling }
}

impl GapOutcome {
    pub fn report(&self, p: &GapParams) -> Report {
        let mut t = Table::new(
            "gap",
            &[
                "hbar", "x_min", "x_max", "nodes", "inv_hbar", "e0", "e1", "gap", "ln_gap",
            ],
        );
        for r in &self.scaling.rows {
            t.push(vec![
                r.hbar.into(),
                p.grid.x_min.into(),
                p.grid.x_max.into(),
                p.grid.nodes.into(),
                (1.0 / r.hbar).into(),
                r.e0.into(),
                r.e1.into(),
                r.gap.into(),
                r.gap.ln().into(),
            ]);
        }
        let fit = |f: Option<ssb_core::eigensolve::LinearFit>| {
            f.map(|f| json!({"slope": f.slope, "intercept": f.intercept, "r_squared": f.r_squared}))
        };
        let summary = json!({
            "experiment": "gap_scaling",
            "points": self.scaling.rows.len(),
            "exponential_fit": fit(self.scaling.exponential),
            "power_fit": fit(self.scaling.power),
            "exponential_accepted": self.scaling.exponential_accepted(),
        });
        let mut series = vec![Series {
            label: "gap".into(),
            points: self
                .scaling
                .rows
                .iter()
                .map(|r| (1.0 / r.hbar, r.gap))
                .collect(),
        }];
        if let Some(f) = self.scaling.exponential {
            series.push(Series {
                label: "exp fit".into(),
                points: self
                    .scaling
                    .rows
                    .iter()
                    .map(|r| (1.0 / r.hbar, (f.slope / r.hbar + f.intercept).exp()))
                    .collect(),
            });
        }
        Report {
            tables: vec![t],
            summary,
            plots: vec![Plot::Lines {
                name: "gap".into(),
                title: "Tunnel splitting".into(),
                x_label: "1/hbar".into(),
                y_label: "E1 - E0".into(),
                log_y: true,
                series,
            }],
            tasks: statuses(&self.tasks),
        }
    }
}
