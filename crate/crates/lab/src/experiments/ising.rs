//! Ground-state magnetization of the transverse-field Ising chain over `(N, epsilon)`.

use serde_json::json;

use ssb_core::spin::{ising_ground_magnetization, IsingChain, OrderOfLimits};

use super::{run_tasks, statuses, Ctx, Report, Task};
use crate::config::IsingParams;
use crate::output::{Plot, Series, Table};

#[derive(Debug, Clone, PartialEq)]
pub struct IsingOutcome {
    /// Row-major over sizes, then fields (`+eps` and, when mirrored, `-eps`).
    pub tasks: Vec<Task<f64>>,
    pub sizes: Vec<usize>,
    pub fields: Vec<f64>,
    /// Trends over the positive fields, present when every task succeeded.
    pub limits: Option<OrderOfLimits>,
}

impl IsingOutcome {
    pub fn m(&self, i: usize, k: usize) -> Option<f64> {
        self.tasks[i * self.fields.len() + k].ok().copied()
    }

    /// `max |m(eps) + m(-eps)|` over mirrored pairs.
    pub fn odd_defect(&self, epsilons: usize) -> Option<f64> {
        if self.fields.len() != 2 * epsilons {
            return None;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.sizes.len() {
            for k in 0..epsilons {
                worst = worst.max((self.m(i, k)? + self.m(i, k + epsilons)?).abs());
            }
        }
        Some(worst)
    }

    /// `sign(m) = -sign(epsilon)` for every nonzero field.
    pub fn signs_ok(&self) -> bool {
        (0..self.sizes.len()).all(|i| {
            self.fields
                .iter()
                .enumerate()
                .all(|(k, &e)| match self.m(i, k) {
                    Some(m) => e == 0.0 || m * e < 0.0,
                    None => false,
                })
        })
    }
}

pub fn run(p: &IsingParams, _ctx: &Ctx) -> IsingOutcome {
    let mut sizes = p.sizes.clone();
    sizes.sort_unstable();
    let mut fields = p.epsilons.clone();
    if p.mirror {
        fields.extend(p.epsilons.iter().map(|e| -e));
    }
    let items = sizes
        .iter()
        .flat_map(|&n| {
            fields
                .iter()
                .map(move |&e| (format!("N={n} eps={e}"), (n, e)))
        })
        .collect();
    let tasks = run_tasks(items, |(n, e)| {
        ising_ground_magnetization(&IsingChain::new(n, p.j, p.b, e, p.boundary.into())?)
    });
    let ne = p.epsilons.len();
    let table: Option<Vec<Vec<f64>>> = (0..sizes.len())
        .map(|i| {
            (0..ne)
                .map(|k| tasks[i * fields.len() + k].ok().copied())
                .collect()
        })
        .collect();
    let limits =
        table.and_then(|m| OrderOfLimits::from_table(sizes.clone(), p.epsilons.clone(), m).ok());
    IsingOutcome {
        tasks,
        sizes,
        fields,
        limits,
    }
}

impl IsingOutcome {
    pub fn report(&self, p: &IsingParams) -> Report {
        let boundary = match p.boundary {
            crate::config::BoundaryParam::Periodic => "periodic",
            crate::config::BoundaryParam::Open => "open",
        };
        let mut t = Table::new("ising", &["n", "epsilon", "j", "b", "boundary", "m"]);
        for (i, &n) in self.sizes.iter().enumerate() {
            for (k, &e) in self.fields.iter().enumerate() {
                if let Some(m) = self.m(i, k) {
                    t.push(vec![
                        n.into(),
                        e.into(),
                        p.j.into(),
                        p.b.into(),
                        boundary.into(),
                        m.into(),
                    ]);
                }
            }
        }
        let series = (0..self.sizes.len())
            .map(|i| Series {
                label: format!("N={}", self.sizes[i]),
                points: (0..p.epsilons.len())
                    .filter_map(|k| Some((self.fields[k].abs().log10(), self.m(i, k)?.abs())))
                    .collect(),
            })
            .collect();
        let summary = json!({
            "experiment": "ising_limits",
            "sizes": self.sizes,
            "epsilons": p.epsilons,
            "rows_decay": self.limits.as_ref().map(|l| l.rows_decay.clone()),
            "columns_nondecreasing": self.limits.as_ref().map(|l| l.columns_nondecreasing.clone()),
            "all_rows_decay": self.limits.as_ref().map(OrderOfLimits::all_rows_decay),
            "all_columns_nondecreasing": self.limits.as_ref().map(OrderOfLimits::all_columns_nondecreasing),
            "odd_defect": self.odd_defect(p.epsilons.len()),
            "signs_ok": self.signs_ok(),
        });
        Report {
            tables: vec![t],
            summary,
            plots: vec![Plot::Lines {
                name: "ising".into(),
                title: "|m| against log10 epsilon".into(),
                x_label: "log10 epsilon".into(),
                y_label: "|m|".into(),
                log_y: true,
                series,
            }],
            tasks: statuses(&self.tasks),
        }
    }
}
