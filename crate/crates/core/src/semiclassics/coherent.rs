use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::lattice::Grid;

/// Minimum number of grid nodes per coherent-state width `sqrt(hbar)`.
pub const MIN_NODES_PER_WIDTH: f64 = 8.0;

/// Gaussian wave packet centered at `(q, p)` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentState {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub hbar: f64,
    /// Samples, unit norm under the grid quadrature weight.
    pub samples: Vec<Complex64>,
    /// Discrete norm of the raw samples minus one.
    pub norm_defect: f64,
}

pub(crate) fn check_hbar(hbar: f64) -> Result<()> {
    if hbar > 0.0 && hbar.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidHbar(hbar))
    }
}

pub(crate) fn check_resolution(grid: &Grid, hbar: f64) -> Result<()> {
    let nodes = hbar.sqrt() / grid.max_spacing();
    if nodes < MIN_NODES_PER_WIDTH {
        return Err(Error::UnderResolved {
            nodes,
            required: MIN_NODES_PER_WIDTH,
        });
    }
    Ok(())
}

/// Exact value of the coherent state at `x`.
pub fn coherent_value(q: &[f64], p: &[f64], hbar: f64, x: &[f64]) -> Complex64 {
    let n = q.len() as f64;
    let mut phase = 0.0;
    let mut dist2 = 0.0;
    for a in 0..q.len() {
        phase += p[a] * x[a] / hbar - p[a] * q[a] / (2.0 * hbar);
        dist2 += (x[a] - q[a]) * (x[a] - q[a]);
    }
    let amp = (core::f64::consts::PI * hbar).powf(-n / 4.0) * (-dist2 / (2.0 * hbar)).exp();
    Complex64::from_polar(amp, phase)
}

/// Samples the coherent state at `(q, p)` and renormalizes it on `grid`.
pub fn coherent_state(q: &[f64], p: &[f64], hbar: f64, grid: &Grid) -> Result<CoherentState> {
    check_hbar(hbar)?;
    if q.len() != grid.dim() || p.len() != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            got: if q.len() != grid.dim() {
                q.len()
            } else {
                p.len()
            },
        });
    }
    check_resolution(grid, hbar)?;
    let dim = grid.dim();
    let mut samples: Vec<Complex64> = (0..grid.len())
        .map(|i| coherent_value(q, p, hbar, &grid.point(i)[..dim]))
        .collect();
    let norm2: f64 = samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.weight();
    let s = 1.0 / norm2.sqrt();
    samples.iter_mut().for_each(|z| *z *= s);
    Ok(CoherentState {
        q: q.to_vec(),
        p: p.to_vec(),
        hbar,
        samples,
        norm_defect: norm2.sqrt() - 1.0,
    })
}

impl CoherentState {
    /// Weighted inner product `<self, psi>`.
    pub fn overlap(&self, psi: &[Complex64], weight: f64) -> Complex64 {
        self.samples
            .iter()
            .zip(psi)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * weight
    }
}
