//! Angular-momentum sectors of the rotation-invariant Mexican hat and the
//! localized tower states built from them.
//!
//! Sector `n` reduces `-hbar^2 Δ + V(|q|)` to a radial problem on `(0, r_max]`.
//! The radial grid is offset by half a node, `r_i = (i + 1/2) h`, with the
//! Dirichlet node `r_N = r_max` just past the last unknown and zero flux
//! through the origin. A finite-volume stencil in the variable
//! `g = sqrt(r) f` gives a symmetric tridiagonal operator, and radial states
//! are normalized by `sum g_i^2 h = 1`, i.e. `int |f|^2 r dr = 1`.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::eigensolve::{lowest_k_with, SolverOptions};
use crate::error::{invalid, Error, Result};
use crate::lattice::{Grid2D, SparseSymmetricOperator};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    pub n: usize,
    pub r_max: f64,
}

impl RadialGrid {
    pub fn new(n: usize, r_max: f64) -> Result<Self> {
        if n < 3 {
            return Err(invalid("radial_nodes", "need at least 3 radial nodes"));
        }
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(invalid("r_max", "must be positive"));
        }
        Ok(Self { n, r_max })
    }

    pub fn spacing(&self) -> f64 {
        self.r_max / (self.n as f64 + 0.5)
    }

    pub fn node(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.spacing()
    }
}

/// Radial Mexican-hat potential `(r^2 - 1)^2`.
pub fn mexican_hat_radial(r: f64) -> f64 {
    let u = r * r - 1.0;
    u * u
}

/// Symmetric radial operator of angular sector `n` acting on `g = sqrt(r) f`.
pub fn radial_operator(
    n_ang: i32,
    hbar: f64,
    grid: &RadialGrid,
    potential: impl Fn(f64) -> f64,
) -> Result<SparseSymmetricOperator> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::InvalidHbar(hbar));
    }
    let h = grid.spacing();
    let hb2 = hbar * hbar;
    let n2 = (n_ang as f64) * (n_ang as f64);
    let mut t = Vec::with_capacity(3 * grid.n);
    for i in 0..grid.n {
        let r = grid.node(i);
        let r_out = (i as f64 + 1.0) * h;
        let r_in = i as f64 * h;
        let diag = hb2 * (r_out + r_in) / (r * h * h) + hb2 * n2 / (r * r) + potential(r);
        t.push((i, i, diag));
        if i + 1 < grid.n {
            let off = -hb2 * r_out / (h * h * (r * grid.node(i + 1)).sqrt());
            t.push((i, i + 1, off));
            t.push((i + 1, i, off));
        }
    }
    SparseSymmetricOperator::from_triplets(grid.n, t)
}

/// Lowest radial state of one angular sector.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialState {
    pub n: i32,
    pub energy: f64,
    pub grid: RadialGrid,
    /// `sqrt(r) f(r)` at the radial nodes, positive, `sum g^2 h = 1`.
    pub g: Vec<f64>,
}

impl RadialState {
    /// `f(r)` by linear interpolation; below the first node `f ~ r^|n|`.
    pub fn radial_value(&self, r: f64) -> f64 {
        let h = self.grid.spacing();
        let f = |i: usize| self.g[i] / self.grid.node(i).sqrt();
        let r0 = self.grid.node(0);
        if r <= r0 {
            return f(0) * (r / r0).powi(self.n.abs());
        }
        let s = r / h - 0.5;
        let i = s.floor() as usize;
        if i + 1 >= self.grid.n {
            // Between the last unknown and the Dirichlet node at r_max.
            let last = self.grid.n - 1;
            let frac = ((r - self.grid.node(last)) / h).min(1.0);
            return if r >= self.grid.r_max {
                0.0
            } else {
                f(last) * (1.0 - frac)
            };
        }
        let frac = s - i as f64;
        f(i) * (1.0 - frac) + f(i + 1) * frac
    }
}

/// Ground state of the Mexican hat restricted to angular momentum `n`.
pub fn radial_ground_state(n_ang: i32, hbar: f64, grid: &RadialGrid) -> Result<RadialState> {
    let op = radial_operator(n_ang, hbar, grid, mexican_hat_radial)?;
    let h = grid.spacing();
    let tol = 1e-10f64.max(64.0 * f64::EPSILON * op.norm_bound());
    let s = lowest_k_with(
        &op,
        1,
        &SolverOptions::default().with_tol(tol).with_weight(h),
    )?;
    Ok(RadialState {
        n: n_ang,
        energy: s.eigenvalues[0],
        grid: *grid,
        g: s.eigenvectors[0].clone(),
    })
}

/// Equal-weight superposition of sectors `-N..=N` rotated to angle `theta`:
/// `Psi = (2N+1)^{-1/2} sum_n f_|n|(r) e^{i n (phi - theta)} / sqrt(2 pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TowerState {
    pub big_n: usize,
    pub theta: f64,
    /// Radial state of `|n|` for `n = 0..=N`.
    pub sectors: Vec<RadialState>,
    /// Overall phase factor of the state.
    pub phase: Complex64,
    overlaps: DMatrix<f64>,
}

/// Assembles the tower state from per-sector radial states. A sector `n` may
/// be supplied as `n` or `-n`; the radial problem depends on `n^2` only.
pub fn mexican_tower(states: &[RadialState], big_n: usize, theta: f64) -> Result<TowerState> {
    let mut sectors = Vec::with_capacity(big_n + 1);
    for a in 0..=big_n as i32 {
        let found = states
            .iter()
            .find(|s| s.n == a)
            .or_else(|| states.iter().find(|s| s.n == -a))
            .ok_or(Error::MissingSector(a))?;
        for sign in [a, -a] {
            if !states.iter().any(|s| s.n.abs() == sign.abs()) {
                return Err(Error::MissingSector(sign));
            }
        }
        sectors.push(found.clone());
    }
    let grid = sectors[0].grid;
    if sectors
        .iter()
        .any(|s| s.grid != grid || s.g.len() != grid.n)
    {
        return Err(invalid("states", "all sectors must share one radial grid"));
    }
    let h = grid.spacing();
    let m = big_n + 1;
    let mut overlaps = DMatrix::zeros(m, m);
    for a in 0..m {
        for b in 0..m {
            overlaps[(a, b)] = sectors[a]
                .g
                .iter()
                .zip(&sectors[b].g)
                .map(|(x, y)| x * y)
                .sum::<f64>()
                * h;
        }
    }
    Ok(TowerState {
        big_n,
        theta,
        sectors,
        phase: Complex64::new(1.0, 0.0),
        overlaps,
    })
}

impl TowerState {
    /// The same state multiplied by `e^{i alpha}`.
    pub fn rephased(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        out.phase *= Complex64::from_polar(1.0, alpha);
        out
    }

    /// Radial marginal `int |Psi|^2 r dr` at angle `phi`; integrates to 1 over the circle.
    pub fn angular_density(&self, phi: f64) -> f64 {
        let nn = self.big_n as i32;
        let mut total = 0.0;
        for n in -nn..=nn {
            for m in -nn..=nn {
                let ov = self.overlaps[(n.unsigned_abs() as usize, m.unsigned_abs() as usize)];
                total += ov * ((n - m) as f64 * (phi - self.theta)).cos();
            }
        }
        total / (2.0 * core::f64::consts::PI * (2 * self.big_n + 1) as f64)
    }

    /// Angular density at the centers `2 pi b / bins` of `bins` equal bins.
    pub fn angular_profile(&self, bins: usize) -> Vec<f64> {
        (0..bins)
            .map(|b| self.angular_density(2.0 * core::f64::consts::PI * b as f64 / bins as f64))
            .collect()
    }

    /// `Psi(x, y)`.
    pub fn value(&self, x: f64, y: f64) -> Complex64 {
        let r = x.hypot(y);
        let phi = y.atan2(x);
        let nn = self.big_n as i32;
        let mut acc = Complex64::new(0.0, 0.0);
        for n in -nn..=nn {
            let f = self.sectors[n.unsigned_abs() as usize].radial_value(r);
            acc += Complex64::from_polar(f, n as f64 * (phi - self.theta));
        }
        let norm = 1.0 / ((2 * self.big_n + 1) as f64 * 2.0 * core::f64::consts::PI).sqrt();
        acc * norm * self.phase
    }

    /// Samples on `grid`, renormalized under the grid weight; returns the
    /// samples and the discrete norm before renormalization minus one.
    pub fn sample(&self, grid: &Grid2D) -> (Vec<Complex64>, f64) {
        let (hx, hy) = grid.spacing();
        let mut v: Vec<Complex64> = (0..grid.len())
            .map(|i| {
                let [x, y] = grid.node(i);
                self.value(x, y)
            })
            .collect();
        let norm = (v.iter().map(|z| z.norm_sqr()).sum::<f64>() * hx * hy).sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|z| *z /= norm);
        }
        (v, norm - 1.0)
    }
}
