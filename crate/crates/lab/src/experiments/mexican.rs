//! Mexican-hat towers of angular-momentum sectors, and the ground state under
//! a disk-supported flea.

use serde_json::json;

use ssb_core::eigensolve::{degeneracy_check, lowest_k_with, DEFAULT_DEGENERACY_THRESHOLD};
use ssb_core::lattice::{assemble_hamiltonian, Boundary, Grid, Grid2D};
use ssb_core::potentials::{classical_minima, PhasePoint, PotentialSpec};
use ssb_core::semiclassics::{
    classical_limit_trace_complex, mexican_tower, radial_ground_state, DiscreteMeasure, PhaseGrid,
    RadialGrid, RadialState, TestFunction,
};

use super::{descending, hbar_label, run_tasks, statuses, Ctx, Report, Task};
use crate::config::MexicanParams;
use crate::output::{Plot, Series, Table};

use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct TowerRow {
    pub big_n: usize,
    pub peak_phi: f64,
    /// Circular distance in bins between the peak and the bin of `theta`.
    pub peak_offset_bins: usize,
    /// Variance of the angular density over 64 equally spaced angles.
    pub angular_variance: f64,
    /// Angular mass within a quarter turn of `theta`.
    pub half_plane_mass: f64,
    pub limit_deviation: Option<f64>,
    pub husimi_mass: Option<f64>,
    pub profile: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TowerSweep {
    pub hbar: f64,
    pub sectors: Vec<(i32, f64)>,
    pub towers: Vec<TowerRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FleaRow {
    pub hbar: f64,
    pub e0: f64,
    pub e1: f64,
    pub gap: f64,
    pub degenerate: bool,
    /// `|psi|^2` mass on the side of the flea, `q . center > 0`.
    pub half_plane_mass: f64,
    pub density: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MexicanOutcome {
    pub towers: Vec<Task<TowerSweep>>,
    pub fleas: Vec<Task<FleaRow>>,
}

/// Eight bumps around the unit circle starting at `theta`, one at the origin,
/// and the four phase coordinates.
pub fn ring_suite(theta: f64) -> Vec<TestFunction> {
    let mut suite: Vec<TestFunction> = (0..8)
        .map(|k| {
            let a = theta + k as f64 * PI / 4.0;
            TestFunction::Bump {
                q0: vec![a.cos(), a.sin()],
                p0: vec![0.0, 0.0],
                sigma: 0.5,
            }
        })
        .collect();
    suite.push(TestFunction::Bump {
        q0: vec![0.0, 0.0],
        p0: vec![0.0, 0.0],
        sigma: 0.5,
    });
    suite.extend((0..4).map(|axis| TestFunction::Coordinate { axis }));
    suite
}

fn circular_offset(a: usize, b: usize, bins: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(bins - d)
}

fn tower_sweep(p: &MexicanParams, hbar: f64) -> ssb_core::Result<TowerSweep> {
    let rgrid = RadialGrid::new(p.radial_nodes, p.r_max)?;
    let max_n = p.tower_sizes.iter().copied().max().unwrap_or(0);
    let states: Vec<RadialState> = (0..=max_n as i32)
        .map(|n| radial_ground_state(n, hbar, &rgrid))
        .collect::<ssb_core::Result<_>>()?;
    let trace = if p.trace_phase_nodes > 0 {
        let grid = Grid2D::square(-p.r_max, p.r_max, p.grid_nodes, Boundary::Dirichlet)?;
        let minima = classical_minima(&PotentialSpec::MexicanHat);
        let phase = PhaseGrid::covering(&minima, 2, hbar, p.trace_phase_nodes)?;
        let target =
            DiscreteMeasure::dirac(PhasePoint::at_rest(vec![p.theta.cos(), p.theta.sin()]));
        Some((grid, phase, target, ring_suite(p.theta)))
    } else {
        None
    };
    let bins = p.angular_bins;
    let theta_bin =
        ((p.theta.rem_euclid(2.0 * PI)) / (2.0 * PI) * bins as f64).round() as usize % bins;
    let mut towers = Vec::new();
    for &big_n in &p.tower_sizes {
        let tower = mexican_tower(&states, big_n, p.theta)?;
        let profile = tower.angular_profile(bins);
        let peak = (0..bins)
            .max_by(|&a, &b| profile[a].total_cmp(&profile[b]))
            .unwrap_or(0);
        let samples: Vec<f64> = (0..64)
            .map(|k| tower.angular_density(2.0 * PI * k as f64 / 64.0))
            .collect();
        let mean = samples.iter().sum::<f64>() / 64.0;
        let variance = samples.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 64.0;
        const QUAD: usize = 4096;
        let half_plane_mass = (0..QUAD)
            .map(|k| {
                let phi = p.theta - PI / 2.0 + (k as f64 + 0.5) * PI / QUAD as f64;
                tower.angular_density(phi)
            })
            .sum::<f64>()
            * PI
            / QUAD as f64;
        let (limit_deviation, husimi_mass) = match &trace {
            Some((grid, phase, target, suite)) => {
                let (psi, _) = tower.sample(grid);
                let g: Grid = grid.clone().into();
                let t = classical_limit_trace_complex(&[(hbar, psi)], &g, phase, suite, target)?;
                (Some(t.rows[0].deviation), Some(t.rows[0].husimi_mass))
            }
            None => (None, None),
        };
        towers.push(TowerRow {
            big_n,
            peak_phi: 2.0 * PI * peak as f64 / bins as f64,
            peak_offset_bins: circular_offset(peak, theta_bin, bins),
            angular_variance: variance,
            half_plane_mass,
            limit_deviation,
            husimi_mass,
            profile,
        });
    }
    Ok(TowerSweep {
        hbar,
        sectors: states.iter().map(|s| (s.n, s.energy)).collect(),
        towers,
    })
}

fn flea_solve(p: &MexicanParams, hbar: f64, ctx: &Ctx) -> ssb_core::Result<FleaRow> {
    let flea = p.flea.expect("flea task without a flea");
    let g2 = Grid2D::square(-p.r_max, p.r_max, p.grid_nodes, Boundary::Dirichlet)?;
    let grid: Grid = g2.clone().into();
    let op = assemble_hamiltonian(&grid, hbar, &PotentialSpec::MexicanHat, Some(&flea.spec()))?;
    let s = lowest_k_with(&op, 2, &ctx.solver(&op, p.tol, grid.weight()))?;
    let psi = &s.eigenvectors[0];
    let [cx, cy] = flea.center;
    let mut above = 0.0;
    let mut total = 0.0;
    for (i, v) in psi.iter().enumerate() {
        let [x, y] = g2.node(i);
        let d = v * v;
        total += d;
        let side = x * cx + y * cy;
        if side > 0.0 {
            above += d;
        } else if side == 0.0 {
            above += 0.5 * d;
        }
    }
    Ok(FleaRow {
        hbar,
        e0: s.eigenvalues[0],
        e1: s.eigenvalues[1],
        gap: s.gap.unwrap_or(0.0),
        degenerate: degeneracy_check(&s, DEFAULT_DEGENERACY_THRESHOLD),
        half_plane_mass: above / total,
        density: psi.iter().map(|v| v * v).collect(),
    })
}

pub fn run(p: &MexicanParams, ctx: &Ctx) -> MexicanOutcome {
    let hbars = descending(&p.hbars);
    let items = hbars
        .iter()
        .map(|&h| (format!("tower {}", hbar_label(h)), h))
        .collect();
    let towers = run_tasks(items, |h| tower_sweep(p, h));
    let fleas = if p.flea.is_some() {
        let items = hbars
            .iter()
            .map(|&h| (format!("flea {}", hbar_label(h)), h))
            .collect();
        run_tasks(items, |h| flea_solve(p, h, ctx))
    } else {
        Vec::new()
    };
    MexicanOutcome { towers, fleas }
}

impl MexicanOutcome {
    pub fn report(&self, p: &MexicanParams) -> Report {
        let mut sectors = Table::new(
            "mexican_sectors",
            &["hbar", "r_max", "radial_nodes", "n", "energy"],
        );
        let mut towers = Table::new(
            "mexican_tower",
            &[
                "hbar",
                "r_max",
                "radial_nodes",
                "big_n",
                "theta",
                "bins",
                "peak_phi",
                "peak_offset_bins",
                "angular_variance",
                "half_plane_mass",
                "limit_deviation",
                "husimi_mass",
            ],
        );
        let mut profiles = Vec::new();
        for sweep in self.towers.iter().filter_map(Task::ok) {
            for (n, e) in &sweep.sectors {
                sectors.push(vec![
                    sweep.hbar.into(),
                    p.r_max.into(),
                    p.radial_nodes.into(),
                    (*n).into(),
                    (*e).into(),
                ]);
            }
            for t in &sweep.towers {
                towers.push(vec![
                    sweep.hbar.into(),
                    p.r_max.into(),
                    p.radial_nodes.into(),
                    t.big_n.into(),
                    p.theta.into(),
                    p.angular_bins.into(),
                    t.peak_phi.into(),
                    t.peak_offset_bins.into(),
                    t.angular_variance.into(),
                    t.half_plane_mass.into(),
                    t.limit_deviation.unwrap_or(f64::NAN).into(),
                    t.husimi_mass.unwrap_or(f64::NAN).into(),
                ]);
                profiles.push(Series {
                    label: format!("hbar={} N={}", sweep.hbar, t.big_n),
                    points: t
                        .profile
                        .iter()
                        .enumerate()
                        .map(|(b, v)| (2.0 * PI * b as f64 / p.angular_bins as f64, *v))
                        .collect(),
                });
            }
        }
        let mut fleas = Table::new(
            "mexican_flea",
            &[
                "hbar",
                "center_x",
                "center_y",
                "c",
                "d",
                "grid_nodes",
                "r_max",
                "e0",
                "e1",
                "gap",
                "degenerate",
                "half_plane_mass",
            ],
        );
        let mut plots = vec![Plot::Lines {
            name: "tower_profiles".into(),
            title: "Angular density of tower states".into(),
            x_label: "phi".into(),
            y_label: "density".into(),
            log_y: false,
            series: profiles,
        }];
        if let Some(f) = p.flea {
            for r in self.fleas.iter().filter_map(Task::ok) {
                fleas.push(vec![
                    r.hbar.into(),
                    f.center[0].into(),
                    f.center[1].into(),
                    f.c.into(),
                    f.d.into(),
                    p.grid_nodes.into(),
                    p.r_max.into(),
                    r.e0.into(),
                    r.e1.into(),
                    r.gap.into(),
                    r.degenerate.into(),
                    r.half_plane_mass.into(),
                ]);
                plots.push(Plot::Heatmap {
                    name: format!("flea_density_hbar_{}", r.hbar),
                    title: format!("Mexican hat with flea, hbar = {}", r.hbar),
                    values: r.density.clone(),
                    nx: p.grid_nodes,
                    ny: p.grid_nodes,
                    extent: [-p.r_max, p.r_max, -p.r_max, p.r_max],
                });
            }
        }
        let flea_masses: Vec<f64> = self
            .fleas
            .iter()
            .filter_map(Task::ok)
            .map(|r| r.half_plane_mass)
            .collect();
        let summary = json!({
            "experiment": "mexican_tower",
            "theta": p.theta,
            "towers": self.towers.iter().filter_map(Task::ok).map(|s| json!({
                "hbar": s.hbar,
                "peak_offset_bins": s.towers.iter().map(|t| t.peak_offset_bins).collect::<Vec<_>>(),
                "half_plane_mass": s.towers.iter().map(|t| t.half_plane_mass).collect::<Vec<_>>(),
                "limit_deviation": s.towers.iter().map(|t| t.limit_deviation).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "flea_half_plane_mass": flea_masses,
            "flea_localizes": flea_masses.iter().any(|m| !(0.4..=0.6).contains(m)),
        });
        let mut tasks = statuses(&self.towers);
        tasks.extend(statuses(&self.fleas));
        Report {
            tables: vec![sectors, towers, fleas],
            summary,
            plots,
            tasks,
        }
    }
}
