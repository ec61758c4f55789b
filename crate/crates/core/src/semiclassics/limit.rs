use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::husimi::{husimi, husimi_complex, HusimiField, PhaseGrid};
use crate::error::{invalid, Error, Result};
use crate::lattice::Grid;
use crate::potentials::PhasePoint;

/// Finitely many weighted Dirac points on phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    points: Vec<PhasePoint>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(points: Vec<PhasePoint>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(invalid(
                "measure",
                "need one weight per point and at least one point",
            ));
        }
        if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(invalid("measure", "weights must be nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid("measure", format!("weights sum to {total}, not 1")));
        }
        Ok(Self { points, weights })
    }

    pub fn dirac(point: PhasePoint) -> Self {
        Self {
            points: vec![point],
            weights: vec![1.0],
        }
    }

    /// Equal-weight mixture of the given points.
    pub fn uniform(points: Vec<PhasePoint>) -> Result<Self> {
        let w = 1.0 / points.len().max(1) as f64;
        let weights = vec![w; points.len()];
        Self::new(points, weights)
    }

    pub fn points(&self) -> &[PhasePoint] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn expect(&self, f: &TestFunction) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(pt, w)| w * f.eval(&pt.q, &pt.p))
            .sum()
    }
}

/// Observable used to compare phase-space measures.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    /// `exp(-(|q - q0|^2 + |p - p0|^2) / (2 sigma^2))`.
    Bump {
        q0: Vec<f64>,
        p0: Vec<f64>,
        sigma: f64,
    },
    /// Phase coordinate `axis` (`q` components first, then `p`).
    Coordinate { axis: usize },
}

impl TestFunction {
    pub fn eval(&self, q: &[f64], p: &[f64]) -> f64 {
        match self {
            TestFunction::Bump { q0, p0, sigma } => {
                let d2: f64 = q
                    .iter()
                    .zip(q0)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    + p.iter()
                        .zip(p0)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>();
                (-d2 / (2.0 * sigma * sigma)).exp()
            }
            TestFunction::Coordinate { axis } => {
                if *axis < q.len() {
                    q[*axis]
                } else {
                    p[*axis - q.len()]
                }
            }
        }
    }
}

/// Width of the default Gaussian test bumps.
pub const DEFAULT_BUMP_SIGMA: f64 = 1.0;

/// Twelve Gaussian bumps on and between the double-well minima plus the
/// coordinate functions `q` and `p`.
pub fn default_suite() -> Vec<TestFunction> {
    let centers: [(f64, f64); 12] = [
        (-1.5, 0.0),
        (-1.0, 0.0),
        (-0.5, 0.0),
        (0.0, 0.0),
        (0.5, 0.0),
        (1.0, 0.0),
        (1.5, 0.0),
        (-1.0, 0.5),
        (-1.0, -0.5),
        (1.0, 0.5),
        (1.0, -0.5),
        (0.0, 0.5),
    ];
    let mut suite: Vec<TestFunction> = centers
        .iter()
        .map(|&(q, p)| TestFunction::Bump {
            q0: vec![q],
            p0: vec![p],
            sigma: DEFAULT_BUMP_SIGMA,
        })
        .collect();
    suite.push(TestFunction::Coordinate { axis: 0 });
    suite.push(TestFunction::Coordinate { axis: 1 });
    suite
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitRow {
    pub hbar: f64,
    /// `integral f dmu_psi` per suite entry.
    pub values: Vec<f64>,
    /// Target expectation per suite entry.
    pub targets: Vec<f64>,
    /// `max |value - target|` over the suite.
    pub deviation: f64,
    pub husimi_mass: f64,
    pub low_mass_warning: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitTrace {
    pub rows: Vec<LimitRow>,
    /// Deviation never increases as `hbar` decreases.
    pub monotone: bool,
}

/// Compares the Husimi measures of `states` with `target` on a test suite.
///
/// `states` holds `(hbar, psi)` pairs with strictly descending `hbar` and
/// unit-norm `psi` on `grid`.
pub fn classical_limit_trace(
    states: &[(f64, Vec<f64>)],
    grid: &Grid,
    phase: &PhaseGrid,
    suite: &[TestFunction],
    target: &DiscreteMeasure,
) -> Result<LimitTrace> {
    let hbars: Vec<f64> = states.iter().map(|s| s.0).collect();
    trace_with(&hbars, phase, suite, target, |i| {
        husimi(&states[i].1, grid, states[i].0, phase)
    })
}

/// [`classical_limit_trace`] for complex states.
pub fn classical_limit_trace_complex(
    states: &[(f64, Vec<Complex64>)],
    grid: &Grid,
    phase: &PhaseGrid,
    suite: &[TestFunction],
    target: &DiscreteMeasure,
) -> Result<LimitTrace> {
    let hbars: Vec<f64> = states.iter().map(|s| s.0).collect();
    trace_with(&hbars, phase, suite, target, |i| {
        husimi_complex(&states[i].1, grid, states[i].0, phase)
    })
}

fn trace_with(
    hbars: &[f64],
    phase: &PhaseGrid,
    suite: &[TestFunction],
    target: &DiscreteMeasure,
    field_of: impl Fn(usize) -> Result<HusimiField>,
) -> Result<LimitTrace> {
    for w in hbars.windows(2) {
        if w[1] >= w[0] {
            return Err(invalid("states", "hbar values must be strictly descending"));
        }
    }
    if suite.is_empty() {
        return Err(invalid("suite", "need at least one test function"));
    }
    let samples: Vec<Vec<f64>> = suite
        .iter()
        .map(|f| phase.sample(|q, p| f.eval(q, p)))
        .collect();
    let targets: Vec<f64> = suite.iter().map(|f| target.expect(f)).collect();
    let mut rows = Vec::with_capacity(hbars.len());
    for (index, hbar) in hbars.iter().enumerate() {
        let field = field_of(index).map_err(|e| Error::Sweep {
            index,
            source: alloc::boxed::Box::new(e),
        })?;
        let values: Vec<f64> = samples.iter().map(|s| field.integrate(s)).collect();
        let deviation = values
            .iter()
            .zip(&targets)
            .map(|(v, t)| (v - t).abs())
            .fold(0.0, f64::max);
        rows.push(LimitRow {
            hbar: *hbar,
            values,
            targets: targets.clone(),
            deviation,
            husimi_mass: field.mass,
            low_mass_warning: field.low_mass_warning,
        });
    }
    let monotone = rows.windows(2).all(|w| w[1].deviation <= w[0].deviation);
    Ok(LimitTrace { rows, monotone })
}
