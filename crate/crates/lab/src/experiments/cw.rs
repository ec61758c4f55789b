//! Curie-Weiss ground states in the Dicke sector for growing `N`.

use serde_json::json;

use ssb_core::spin::{cw_classical_minima, cw_ground, CwGround, SpinFlea};

use super::{run_tasks, statuses, Ctx, Report, Task};
use crate::config::CwParams;
use crate::output::{Plot, Series, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Symmetric,
    Flea,
    FleaFlipped,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Symmetric => "none",
            Variant::Flea => "flea",
            Variant::FleaFlipped => "flea_flipped",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CwRow {
    pub n: usize,
    pub variant: Variant,
    pub ground: CwGround,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CwOutcome {
    pub tasks: Vec<Task<CwRow>>,
    /// `(x, z^2)` at a classical minimum.
    pub classical: (f64, f64),
    /// Sign of `z` the flea selects, `0` without a flea.
    pub predicted_side: i32,
}

/// `-sign(b d)`: the flea raises the energy near `m = b` when `b d > 0`.
pub fn predicted_side(flea: &SpinFlea) -> i32 {
    let s = flea.b * flea.d;
    if s > 0.0 {
        -1
    } else if s < 0.0 {
        1
    } else {
        0
    }
}

impl CwOutcome {
    pub fn rows(&self, variant: Variant) -> impl Iterator<Item = &CwRow> {
        self.tasks
            .iter()
            .filter_map(Task::ok)
            .filter(move |r| r.variant == variant)
    }
}

pub fn run(p: &CwParams, _ctx: &Ctx) -> CwOutcome {
    let flea = p.flea.map(|f| f.flea());
    let mut variants = vec![Variant::Symmetric];
    if flea.is_some() {
        variants.extend([Variant::Flea, Variant::FleaFlipped]);
    }
    let mut sizes = p.sizes.clone();
    sizes.sort_unstable();
    let items = variants
        .iter()
        .flat_map(|&v| {
            sizes
                .iter()
                .map(move |&n| (format!("{} N={n}", v.name()), (v, n)))
        })
        .collect();
    let tasks = run_tasks(items, |(variant, n)| {
        let f = match variant {
            Variant::Symmetric => None,
            Variant::Flea => flea,
            Variant::FleaFlipped => flea.map(|f| f.flipped()),
        };
        Ok(CwRow {
            n,
            variant,
            ground: cw_ground(n, p.j, p.b, f.as_ref())?,
        })
    });
    let m = cw_classical_minima(p.j, p.b)[0];
    CwOutcome {
        tasks,
        classical: (m.x, m.z2),
        predicted_side: flea.as_ref().map_or(0, predicted_side),
    }
}

impl CwOutcome {
    pub fn report(&self, p: &CwParams) -> Report {
        let f = p.flea.unwrap_or_default();
        let mut t = Table::new(
            "cw",
            &[
                "n",
                "j",
                "b",
                "variant",
                "flea_b",
                "flea_c",
                "flea_d",
                "flea_odd",
                "energy",
                "gap",
                "degenerate",
                "x",
                "y",
                "z",
                "z2",
                "x_classical",
                "z2_classical",
                "x_error",
                "z2_error",
            ],
        );
        let (xc, z2c) = self.classical;
        for r in self.tasks.iter().filter_map(Task::ok) {
            let g = &r.ground;
            let (fb, fc, fd, fo) = match r.variant {
                Variant::Symmetric => (f64::NAN, f64::NAN, 0.0, false),
                Variant::Flea => (f.b, f.c, f.d, f.odd),
                Variant::FleaFlipped => (f.b, f.c, -f.d, f.odd),
            };
            t.push(vec![
                r.n.into(),
                p.j.into(),
                p.b.into(),
                r.variant.name().into(),
                fb.into(),
                fc.into(),
                fd.into(),
                fo.into(),
                g.energy.into(),
                g.gap.into(),
                g.degenerate.into(),
                g.point.x.into(),
                g.point.y.into(),
                g.point.z.into(),
                g.point.z2.into(),
                xc.into(),
                z2c.into(),
                (g.point.x - xc).abs().into(),
                (g.point.z2 - z2c).abs().into(),
            ]);
        }
        let series = |v: Variant, pick: fn(&CwRow) -> f64| Series {
            label: v.name().into(),
            points: self.rows(v).map(|r| (r.n as f64, pick(r))).collect(),
        };
        let mut z_series = vec![series(Variant::Symmetric, |r| r.ground.point.z)];
        if p.flea.is_some() {
            z_series.push(series(Variant::Flea, |r| r.ground.point.z));
            z_series.push(series(Variant::FleaFlipped, |r| r.ground.point.z));
        }
        let sym: Vec<&CwRow> = self.rows(Variant::Symmetric).collect();
        let antisymmetry = self
            .rows(Variant::Flea)
            .zip(self.rows(Variant::FleaFlipped))
            .map(|(a, b)| (a.ground.point.z + b.ground.point.z).abs())
            .fold(0.0, f64::max);
        let summary = json!({
            "experiment": "cw_scan",
            "analog": true,
            "j": p.j,
            "b": p.b,
            "classical": {"x": xc, "z2": z2c},
            "sizes": sym.iter().map(|r| r.n).collect::<Vec<_>>(),
            "x_error": sym.iter().map(|r| (r.ground.point.x - xc).abs()).collect::<Vec<_>>(),
            "z2_error": sym.iter().map(|r| (r.ground.point.z2 - z2c).abs()).collect::<Vec<_>>(),
            "flea_predicted_side": self.predicted_side,
            "flea_z": self.rows(Variant::Flea).map(|r| r.ground.point.z).collect::<Vec<_>>(),
            "flip_antisymmetry_defect": antisymmetry,
        });
        Report {
            tables: vec![t],
            summary,
            plots: vec![
                Plot::Lines {
                    name: "cw_errors".into(),
                    title: "Distance to the classical minimum".into(),
                    x_label: "N".into(),
                    y_label: "error".into(),
                    log_y: true,
                    series: vec![
                        Series {
                            label: "|x - x_cl|".into(),
                            points: sym
                                .iter()
                                .map(|r| (r.n as f64, (r.ground.point.x - xc).abs()))
                                .collect(),
                        },
                        Series {
                            label: "|z2 - z2_cl|".into(),
                            points: sym
                                .iter()
                                .map(|r| (r.n as f64, (r.ground.point.z2 - z2c).abs()))
                                .collect(),
                        },
                    ],
                },
                Plot::Lines {
                    name: "cw_z".into(),
                    title: "Magnetization <z>".into(),
                    x_label: "N".into(),
                    y_label: "z".into(),
                    log_y: false,
                    series: z_series,
                },
            ],
            tasks: statuses(&self.tasks),
        }
    }
}
