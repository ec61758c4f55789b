//! Ground states of the double well, with or without a flea, across `hbar`.

use serde_json::json;

use ssb_core::eigensolve::{
    degeneracy_check, lowest_k_with, Parity, Sector, SolverOptions, Spectrum,
    DEFAULT_DEGENERACY_THRESHOLD,
};
use ssb_core::lattice::{assemble_hamiltonian, Grid, SparseSymmetricOperator};
use ssb_core::potentials::{classical_minima, eval_potential, PhasePoint, PotentialSpec};
use ssb_core::semiclassics::{
    classical_limit_trace, default_suite, half_space_mass, husimi, position_half_space_mass,
    DiscreteMeasure, PhaseGrid,
};

use super::{descending, hbar_label, run_tasks, statuses, Ctx, Report, Task};
use crate::config::{DoublewellParams, FleaParams};
use crate::output::{Plot, Series, Table};

#[derive(Debug, Clone, PartialEq)]
pub struct DoublewellRow {
    pub hbar: f64,
    pub e0: f64,
    pub e1: f64,
    pub gap: f64,
    pub degenerate: bool,
    /// Husimi mass at `q > 0`.
    pub husimi_right: f64,
    /// `|psi|^2` mass at `x > 0`.
    pub position_right: f64,
    pub husimi_mass: f64,
    pub low_mass_warning: bool,
    /// Suite deviation from the predicted limit measure.
    pub limit_deviation: f64,
    pub residual: f64,
    pub psi: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoublewellOutcome {
    pub tasks: Vec<Task<DoublewellRow>>,
    /// `+1` or `-1`: the well the flea selects, `0` without a flea.
    pub predicted_side: i32,
    pub grid: Grid,
}

/// Even and odd sector ground states of a reflection-symmetric operator.
pub(crate) fn symmetric_pair(
    op: &SparseSymmetricOperator,
    grid: &Grid,
    opts: &SolverOptions,
) -> ssb_core::Result<(Spectrum, Spectrum)> {
    let even = Sector::new(grid.reflection(0)?, Parity::Even)?;
    let odd = even.with_parity(Parity::Odd);
    let e = lowest_k_with(op, 1, &opts.clone().with_sector(even))?;
    let o = lowest_k_with(op, 1, &opts.clone().with_sector(odd))?;
    Ok((e, o))
}

/// The well a flea `d * bump(x - b)` selects: a dip attracts, a bump repels.
pub fn predicted_side(flea: Option<&FleaParams>) -> i32 {
    match flea {
        None => 0,
        Some(f) if f.d == 0.0 || f.b == 0.0 => 0,
        Some(f) => {
            let s = if f.b > 0.0 { 1 } else { -1 };
            if f.d < 0.0 {
                s
            } else {
                -s
            }
        }
    }
}

pub(crate) fn limit_target(side: i32) -> DiscreteMeasure {
    let at = |q: f64| PhasePoint::at_rest(vec![q]);
    match side {
        0 => DiscreteMeasure::uniform(vec![at(-1.0), at(1.0)]).expect("two-point measure"),
        s => DiscreteMeasure::dirac(at(s as f64)),
    }
}

pub fn phase_grid(hbar_max: f64, nodes: usize) -> ssb_core::Result<PhaseGrid> {
    PhaseGrid::covering(
        &classical_minima(&PotentialSpec::DoubleWell),
        1,
        hbar_max,
        nodes,
    )
}

pub fn run(p: &DoublewellParams, ctx: &Ctx) -> DoublewellOutcome {
    let grid = p.grid.build().expect("validated grid");
    let hbars = descending(&p.hbars);
    let side = predicted_side(p.flea.as_ref());
    let target = limit_target(side);
    let suite = default_suite();
    let flea = p.flea.map(|f| f.spec());
    let items = hbars.iter().map(|&h| (hbar_label(h), h)).collect();
    let tasks = run_tasks(items, |hbar| {
        let phase = phase_grid(hbars[0], p.phase_nodes)?;
        let op = assemble_hamiltonian(&grid, hbar, &PotentialSpec::DoubleWell, flea.as_ref())?;
        let opts = ctx.solver(&op, p.tol, grid.weight());
        let (e0, e1, gap, degenerate, residual, psi) = match flea {
            Some(_) => {
                let s = lowest_k_with(&op, 2, &opts)?;
                let gap = s.gap.unwrap_or(0.0);
                let res = s.residuals[0];
                let deg = degeneracy_check(&s, DEFAULT_DEGENERACY_THRESHOLD);
                (
                    s.eigenvalues[0],
                    s.eigenvalues[1],
                    gap,
                    deg,
                    res,
                    s.eigenvectors[0].clone(),
                )
            }
            None => {
                let (e, o) = symmetric_pair(&op, &grid, &opts)?;
                let gap = o.eigenvalues[0] - e.eigenvalues[0];
                let deg = gap <= DEFAULT_DEGENERACY_THRESHOLD * e.eigenvalues[0].abs().max(1.0);
                (
                    e.eigenvalues[0],
                    o.eigenvalues[0],
                    gap,
                    deg,
                    e.residuals[0],
                    e.eigenvectors[0].clone(),
                )
            }
        };
        let field = husimi(&psi, &grid, hbar, &phase)?;
        let trace = classical_limit_trace(&[(hbar, psi.clone())], &grid, &phase, &suite, &target)?;
        Ok(DoublewellRow {
            hbar,
            e0,
            e1,
            gap,
            degenerate,
            husimi_right: half_space_mass(&field, 0, 0.0)?,
            position_right: position_half_space_mass(&psi, &grid, 0, 0.0)?,
            husimi_mass: field.mass,
            low_mass_warning: field.low_mass_warning,
            limit_deviation: trace.rows[0].deviation,
            residual,
            psi,
        })
    });
    DoublewellOutcome {
        tasks,
        predicted_side: side,
        grid,
    }
}

impl DoublewellOutcome {
    pub fn rows(&self) -> impl Iterator<Item = &DoublewellRow> {
        self.tasks.iter().filter_map(Task::ok)
    }

    pub fn report(&self, p: &DoublewellParams) -> Report {
        let flea = p.flea.unwrap_or(FleaParams {
            b: 0.0,
            c: 0.0,
            d: 0.0,
        });
        let mut t = Table::new(
            "localization",
            &[
                "hbar",
                "flea",
                "b",
                "c",
                "d",
                "x_min",
                "x_max",
                "nodes",
                "e0",
                "e1",
                "gap",
                "degenerate",
                "half_space_mass",
                "husimi_right",
                "position_right",
                "husimi_mass",
                "low_mass_warning",
                "limit_deviation",
                "residual",
            ],
        );
        for r in self.rows() {
            let localized = match self.predicted_side {
                -1 => 1.0 - r.husimi_right,
                1 => r.husimi_right,
                _ => r.husimi_right,
            };
            t.push(vec![
                r.hbar.into(),
                p.flea.is_some().into(),
                flea.b.into(),
                flea.c.into(),
                flea.d.into(),
                p.grid.x_min.into(),
                p.grid.x_max.into(),
                p.grid.nodes.into(),
                r.e0.into(),
                r.e1.into(),
                r.gap.into(),
                r.degenerate.into(),
                localized.into(),
                r.husimi_right.into(),
                r.position_right.into(),
                r.husimi_mass.into(),
                r.low_mass_warning.into(),
                r.limit_deviation.into(),
                r.residual.into(),
            ]);
        }
        let deviations: Vec<f64> = self.rows().map(|r| r.limit_deviation).collect();
        let summary = json!({
            "experiment": "doublewell_flea",
            "flea": p.flea,
            "predicted_side": self.predicted_side,
            "hbars": self.rows().map(|r| r.hbar).collect::<Vec<_>>(),
            "half_space_mass": t.rows.iter().map(|r| r[12].as_f64()).collect::<Vec<_>>(),
            "limit_deviation": deviations,
            "limit_monotone": deviations.windows(2).all(|w| w[1] <= w[0]),
            "nondegenerate": self.rows().all(|r| !r.degenerate),
        });
        let xs: Vec<f64> = (0..self.grid.len())
            .map(|i| self.grid.point(i)[0])
            .collect();
        let densities = self
            .rows()
            .map(|r| Series {
                label: format!("hbar={}", r.hbar),
                points: xs.iter().zip(&r.psi).map(|(x, v)| (*x, v * v)).collect(),
            })
            .collect();
        let flea_spec = p.flea.map(|f| f.spec());
        let potential = Series {
            label: "V + flea".into(),
            points: (0..self.grid.len())
                .map(|i| {
                    let v =
                        eval_potential(&PotentialSpec::DoubleWell, &[xs[i]]).unwrap_or(f64::NAN);
                    let f = flea_spec
                        .as_ref()
                        .and_then(|f| f.value_at(&self.grid, i).ok())
                        .unwrap_or(0.0);
                    (xs[i], v + f)
                })
                .filter(|(_, v)| *v <= 2.0)
                .collect(),
        };
        let plots = vec![
            Plot::Lines {
                name: "potential".into(),
                title: "Double-well potential with flea".into(),
                x_label: "x".into(),
                y_label: "V(x)".into(),
                log_y: false,
                series: vec![potential],
            },
            Plot::Lines {
                name: "ground_states".into(),
                title: "Ground-state densities".into(),
                x_label: "x".into(),
                y_label: "|psi|^2".into(),
                log_y: false,
                series: densities,
            },
            Plot::Lines {
                name: "half_space_mass".into(),
                title: "Husimi mass on the localized side".into(),
                x_label: "1/hbar".into(),
                y_label: "mass".into(),
                log_y: false,
                series: vec![Series {
                    label: "mass".into(),
                    points: t
                        .rows
                        .iter()
                        .map(|r| (1.0 / r[0].as_f64().unwrap(), r[12].as_f64().unwrap()))
                        .collect(),
                }],
            },
        ];
        Report {
            tables: vec![t],
            summary,
            plots,
            tasks: statuses(&self.tasks),
        }
    }
}
