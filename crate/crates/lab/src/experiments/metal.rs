//! A 2D Gaussian lattice with a grid-point flea in every cell but the central one.

use serde_json::json;

use ssb_core::eigensolve::{degeneracy_check, lowest_k_with, DEFAULT_DEGENERACY_THRESHOLD};
use ssb_core::lattice::{assemble_hamiltonian, Grid, Grid2D};
use ssb_core::potentials::{GaussianLattice, PotentialSpec};
use ssb_core::semiclassics::lattice_cell_masses;

use super::{descending, hbar_label, run_tasks, statuses, Ctx, Report, Task};
use crate::config::MetalParams;
use crate::output::{Plot, Table};

#[derive(Debug, Clone, PartialEq)]
pub struct MetalRow {
    pub hbar: f64,
    pub e0: f64,
    pub e1: f64,
    pub gap: f64,
    pub degenerate: bool,
    /// Row-major over `(cx, cy)`, `cells * cells` entries.
    pub cell_masses: Vec<f64>,
    pub center_mass: f64,
    pub max_mass: f64,
    pub max_cell: (usize, usize),
    pub density: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetalOutcome {
    pub tasks: Vec<Task<MetalRow>>,
    pub lattice: GaussianLattice,
    pub grid: Grid2D,
}

pub fn run(p: &MetalParams, ctx: &Ctx) -> MetalOutcome {
    let lattice = p.lattice.lattice();
    let g2 = p.grid().expect("validated lattice grid");
    let grid: Grid = g2.clone().into();
    let flea = p.flea_spec(&g2);
    let cells = lattice.cells;
    let items = descending(&p.hbars)
        .into_iter()
        .map(|h| (hbar_label(h), h))
        .collect();
    let tasks =
        run_tasks(items, |hbar| {
            let op = assemble_hamiltonian(
                &grid,
                hbar,
                &PotentialSpec::GaussianLattice(lattice),
                Some(&flea),
            )?;
            let s = lowest_k_with(&op, 2, &ctx.solver(&op, p.tol, grid.weight()))?;
            let psi = &s.eigenvectors[0];
            let cell_masses = lattice_cell_masses(psi, &g2, &lattice)?;
            let center = cells / 2;
            let (imax, max_mass) = cell_masses.iter().copied().enumerate().fold(
                (0, f64::NEG_INFINITY),
                |a, (i, m)| if m > a.1 { (i, m) } else { a },
            );
            Ok(MetalRow {
                hbar,
                e0: s.eigenvalues[0],
                e1: s.eigenvalues[1],
                gap: s.gap.unwrap_or(0.0),
                degenerate: degeneracy_check(&s, DEFAULT_DEGENERACY_THRESHOLD),
                center_mass: cell_masses[center * cells + center],
                max_mass,
                max_cell: (imax / cells, imax % cells),
                cell_masses,
                density: psi.iter().map(|v| v * v).collect(),
            })
        });
    MetalOutcome {
        tasks,
        lattice,
        grid: g2,
    }
}

impl MetalOutcome {
    pub fn report(&self, p: &MetalParams) -> Report {
        let l = &self.lattice;
        let lattice_cols = |t: &mut Vec<crate::output::Cell>, hbar: f64| {
            t.extend([
                hbar.into(),
                l.v0.into(),
                l.alpha_x.into(),
                l.alpha_y.into(),
                l.a.into(),
                l.cells.into(),
                l.lattice_const.into(),
                p.nodes_per_cell.into(),
                p.delta.into(),
                p.flea_offset.into(),
            ]);
        };
        const PARAMS: [&str; 10] = [
            "hbar",
            "v0",
            "alpha_x",
            "alpha_y",
            "a",
            "cells",
            "lattice_const",
            "nodes_per_cell",
            "delta",
            "flea_offset",
        ];
        let header: Vec<&str> = PARAMS
            .iter()
            .copied()
            .chain([
                "e0",
                "e1",
                "gap",
                "degenerate",
                "center_mass",
                "max_mass",
                "max_cell_x",
                "max_cell_y",
            ])
            .collect();
        let mut metal = Table::new("metal", &header);
        let cell_header: Vec<&str> = PARAMS
            .iter()
            .copied()
            .chain(["cell_x", "cell_y", "mass"])
            .collect();
        let mut cells = Table::new("cell_masses", &cell_header);
        let mut plots = Vec::new();
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        let (lo, hi) = l.bounds();
        for r in self.tasks.iter().filter_map(Task::ok) {
            let mut row = Vec::new();
            lattice_cols(&mut row, r.hbar);
            row.extend([
                r.e0.into(),
                r.e1.into(),
                r.gap.into(),
                r.degenerate.into(),
                r.center_mass.into(),
                r.max_mass.into(),
                r.max_cell.0.into(),
                r.max_cell.1.into(),
            ]);
            metal.push(row);
            for (i, m) in r.cell_masses.iter().enumerate() {
                let mut row = Vec::new();
                lattice_cols(&mut row, r.hbar);
                row.extend([(i / l.cells).into(), (i % l.cells).into(), (*m).into()]);
                cells.push(row);
            }
            plots.push(Plot::Heatmap {
                name: format!("density_hbar_{}", r.hbar),
                title: format!("Ground-state density, hbar = {}", r.hbar),
                values: r.density.clone(),
                nx,
                ny,
                extent: [lo, hi, lo, hi],
            });
        }
        let flea_points = p.flea_points(&self.grid);
        let values = (0..self.grid.len())
            .map(|i| {
                let [x, y] = self.grid.node(i);
                l.eval(x, y)
                    + if flea_points.contains(&i) {
                        p.delta
                    } else {
                        0.0
                    }
            })
            .collect();
        plots.push(Plot::Heatmap {
            name: "potential".into(),
            title: "Lattice potential with fleas".into(),
            values,
            nx,
            ny,
            extent: [lo, hi, lo, hi],
        });
        let rows: Vec<&MetalRow> = self.tasks.iter().filter_map(Task::ok).collect();
        let summary = json!({
            "experiment": "metal2d_flea",
            "hbars": rows.iter().map(|r| r.hbar).collect::<Vec<_>>(),
            "center_mass": rows.iter().map(|r| r.center_mass).collect::<Vec<_>>(),
            "max_mass": rows.iter().map(|r| r.max_mass).collect::<Vec<_>>(),
            "gap": rows.iter().map(|r| r.gap).collect::<Vec<_>>(),
            "nondegenerate": rows.iter().all(|r| !r.degenerate),
        });
        Report {
            tables: vec![metal, cells],
            summary,
            plots,
            tasks: statuses(&self.tasks),
        }
    }
}
