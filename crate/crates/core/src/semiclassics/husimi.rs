use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::coherent::{check_hbar, check_resolution};
use crate::error::{invalid, Error, Result};
use crate::lattice::{Axis, Boundary, Grid};
use crate::potentials::ClassicalMinima;

/// Gaussian windows are cut where `exp(-d^2 / 2 hbar)` drops below `1.6e-17`.
pub const WINDOW_WIDTHS: f64 = 8.8;

/// Mass below which a Husimi field is flagged as clipped by its phase grid.
pub const LOW_MASS: f64 = 0.99;

/// Closed uniform grid on phase space, one `q` and one `p` axis per dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    q_axes: Vec<Axis>,
    p_axes: Vec<Axis>,
}

fn check_axis(a: &Axis) -> Result<()> {
    if !(a.min.is_finite() && a.max.is_finite() && a.min < a.max) || a.n < 2 {
        return Err(invalid(
            "phase_grid",
            format!(
                "axis [{}, {}] with {} nodes is not a valid axis",
                a.min, a.max, a.n
            ),
        ));
    }
    Ok(())
}

fn closed_node(a: &Axis, i: usize) -> f64 {
    a.min + i as f64 * closed_spacing(a)
}

fn closed_spacing(a: &Axis) -> f64 {
    (a.max - a.min) / (a.n - 1) as f64
}

impl PhaseGrid {
    pub fn new(q_axes: Vec<Axis>, p_axes: Vec<Axis>) -> Result<Self> {
        if q_axes.len() != p_axes.len() || q_axes.is_empty() || q_axes.len() > 2 {
            return Err(invalid(
                "phase_grid",
                "need one q and one p axis per dimension (1 or 2)",
            ));
        }
        for a in q_axes.iter().chain(&p_axes) {
            check_axis(a)?;
        }
        Ok(Self { q_axes, p_axes })
    }

    /// `[min, max]^2` with `n` nodes per axis in one dimension.
    pub fn square_1d(min: f64, max: f64, n: usize) -> Result<Self> {
        let a = Axis { min, max, n };
        Self::new(vec![a], vec![a])
    }

    /// `q, p` in `[-2, 2]` with 201 nodes each.
    pub fn default_1d() -> Self {
        Self::square_1d(-2.0, 2.0, 201).expect("static phase grid")
    }

    /// `[-2, 2]` per axis, widened so every classical minimum keeps a margin of
    /// `5 sqrt(hbar_max)` in position and momentum.
    pub fn covering(minima: &ClassicalMinima, dim: usize, hbar_max: f64, n: usize) -> Result<Self> {
        check_hbar(hbar_max)?;
        let margin = 5.0 * hbar_max.sqrt();
        let mut lo = vec![-2.0f64; dim];
        let mut hi = vec![2.0f64; dim];
        match minima {
            ClassicalMinima::FinitePoints(points) => {
                for pt in points {
                    if pt.q.len() != dim {
                        return Err(Error::DimensionMismatch {
                            expected: dim,
                            got: pt.q.len(),
                        });
                    }
                    for a in 0..dim {
                        lo[a] = lo[a].min(pt.q[a] - margin);
                        hi[a] = hi[a].max(pt.q[a] + margin);
                    }
                }
            }
            ClassicalMinima::Circle { radius } => {
                for a in 0..dim {
                    lo[a] = lo[a].min(-radius - margin);
                    hi[a] = hi[a].max(radius + margin);
                }
            }
        }
        let pmax = 2.0f64.max(margin);
        let q_axes = (0..dim)
            .map(|a| Axis {
                min: lo[a],
                max: hi[a],
                n,
            })
            .collect();
        let p_axes = (0..dim)
            .map(|_| Axis {
                min: -pmax,
                max: pmax,
                n,
            })
            .collect();
        Self::new(q_axes, p_axes)
    }

    /// True when each minimum sits at least `3 sqrt(hbar_max)` inside every axis.
    pub fn covers(&self, minima: &ClassicalMinima, hbar_max: f64) -> bool {
        let m = 3.0 * hbar_max.sqrt();
        let inside = |a: &Axis, v: f64| v - m >= a.min && v + m <= a.max;
        let p_ok = self.p_axes.iter().all(|a| inside(a, 0.0));
        p_ok && match minima {
            ClassicalMinima::FinitePoints(points) => points
                .iter()
                .all(|pt| pt.q.iter().zip(&self.q_axes).all(|(v, a)| inside(a, *v))),
            ClassicalMinima::Circle { radius } => self
                .q_axes
                .iter()
                .all(|a| inside(a, *radius) && inside(a, -radius)),
        }
    }

    pub fn dim(&self) -> usize {
        self.q_axes.len()
    }

    pub fn q_axis(&self, a: usize) -> Axis {
        self.q_axes[a]
    }

    pub fn p_axis(&self, a: usize) -> Axis {
        self.p_axes[a]
    }

    pub fn len(&self) -> usize {
        self.q_axes
            .iter()
            .chain(&self.p_axes)
            .map(|a| a.n)
            .product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Scaled Lebesgue weight `dq dp / (2 pi hbar)^dim` of one node.
    pub fn weight(&self, hbar: f64) -> f64 {
        let mut w = 1.0;
        for a in 0..self.dim() {
            w *= closed_spacing(&self.q_axes[a]) * closed_spacing(&self.p_axes[a])
                / (2.0 * core::f64::consts::PI * hbar);
        }
        w
    }

    /// Per-axis `(iq, ip)` indices of node `idx`.
    ///
    /// Nodes are ordered axis pair by axis pair, `p` fastest within a pair:
    /// `iq * np + ip` in one dimension and
    /// `((iq1 * np1 + ip1) * nq2 + iq2) * np2 + ip2` in two.
    pub fn split(&self, idx: usize) -> [(usize, usize); 2] {
        let mut out = [(0, 0); 2];
        let mut rest = idx;
        for a in (0..self.dim()).rev() {
            let np = self.p_axes[a].n;
            let nq = self.q_axes[a].n;
            let ip = rest % np;
            rest /= np;
            let iq = rest % nq;
            rest /= nq;
            out[a] = (iq, ip);
        }
        out
    }

    /// Coordinates `(q, p)` of node `idx`; entries beyond `dim()` are zero.
    pub fn point(&self, idx: usize) -> ([f64; 2], [f64; 2]) {
        let s = self.split(idx);
        let mut q = [0.0; 2];
        let mut p = [0.0; 2];
        for a in 0..self.dim() {
            q[a] = closed_node(&self.q_axes[a], s[a].0);
            p[a] = closed_node(&self.p_axes[a], s[a].1);
        }
        (q, p)
    }

    /// Phase coordinate `axis` of node `idx`: `q` components first, then `p`.
    pub fn coordinate(&self, idx: usize, axis: usize) -> f64 {
        let (q, p) = self.point(idx);
        if axis < self.dim() {
            q[axis]
        } else {
            p[axis - self.dim()]
        }
    }

    /// Samples `f(q, p)` on every node.
    pub fn sample(&self, f: impl Fn(&[f64], &[f64]) -> f64) -> Vec<f64> {
        let d = self.dim();
        (0..self.len())
            .map(|i| {
                let (q, p) = self.point(i);
                f(&q[..d], &p[..d])
            })
            .collect()
    }
}

/// One grid axis seen by the coherent-state kernel.
#[derive(Debug, Clone, Copy)]
pub(crate) struct KernelAxis {
    pub x0: f64,
    pub h: f64,
    pub n: usize,
}

pub(crate) fn kernel_axes(grid: &Grid) -> Vec<KernelAxis> {
    let mk = |a: Axis, bc: Boundary| KernelAxis {
        x0: a.min,
        h: a.spacing(bc),
        n: a.n,
    };
    match grid {
        Grid::One(g) => vec![mk(g.axis(), g.boundary())],
        Grid::Two(g) => vec![mk(g.x_axis(), g.boundary()), mk(g.y_axis(), g.boundary())],
    }
}

/// Node window `[lo, hi)` of the Gaussian centered at `q`.
pub(crate) fn window(ax: &KernelAxis, q: f64, hbar: f64) -> (usize, usize) {
    let half = WINDOW_WIDTHS * hbar.sqrt();
    let lo = ((q - half - ax.x0) / ax.h).ceil().max(0.0) as usize;
    let hi = (((q + half - ax.x0) / ax.h).floor() + 1.0).clamp(0.0, ax.n as f64) as usize;
    (lo.min(hi), hi)
}

/// `out[iq * np + ip] = (pi hbar)^{-1/4} sum_j exp(-(x_j - q)^2 / 2 hbar - i p x_j / hbar) v_j h`.
pub(crate) fn axis_transform(
    ax: &KernelAxis,
    q_axis: &Axis,
    p_axis: &Axis,
    hbar: f64,
    v: &[Complex64],
) -> Vec<Complex64> {
    let norm = (core::f64::consts::PI * hbar).powf(-0.25) * ax.h;
    let mut out = vec![Complex64::new(0.0, 0.0); q_axis.n * p_axis.n];
    let mut w: Vec<Complex64> = Vec::new();
    for iq in 0..q_axis.n {
        let q = closed_node(q_axis, iq);
        let (lo, hi) = window(ax, q, hbar);
        if lo >= hi {
            continue;
        }
        w.clear();
        w.extend((lo..hi).map(|j| {
            let x = ax.x0 + j as f64 * ax.h;
            v[j] * ((-(x - q) * (x - q) / (2.0 * hbar)).exp() * norm)
        }));
        let x_lo = ax.x0 + lo as f64 * ax.h;
        for ip in 0..p_axis.n {
            let p = closed_node(p_axis, ip);
            let step = Complex64::from_polar(1.0, -p * ax.h / hbar);
            let mut z = Complex64::from_polar(1.0, -p * x_lo / hbar);
            let mut acc = Complex64::new(0.0, 0.0);
            for wj in &w {
                acc += wj * z;
                z *= step;
            }
            out[iq * p_axis.n + ip] = acc;
        }
    }
    out
}

/// Amplitudes `<Psi^(q,p), psi>` (up to a phase per node) on every phase node.
pub(crate) fn amplitudes(
    psi: &[Complex64],
    grid: &Grid,
    hbar: f64,
    phase: &PhaseGrid,
) -> Vec<Complex64> {
    let axes = kernel_axes(grid);
    match axes.len() {
        1 => axis_transform(&axes[0], &phase.q_axes[0], &phase.p_axes[0], hbar, psi),
        _ => {
            let (ax1, ax2) = (axes[0], axes[1]);
            let m2 = phase.q_axes[1].n * phase.p_axes[1].n;
            let m1 = phase.q_axes[0].n * phase.p_axes[0].n;
            // Contract the second axis row by row: rows are x-index blocks.
            let mut t = vec![Complex64::new(0.0, 0.0); ax1.n * m2];
            for j1 in 0..ax1.n {
                let row = &psi[j1 * ax2.n..(j1 + 1) * ax2.n];
                let r = axis_transform(&ax2, &phase.q_axes[1], &phase.p_axes[1], hbar, row);
                t[j1 * m2..(j1 + 1) * m2].copy_from_slice(&r);
            }
            let mut out = vec![Complex64::new(0.0, 0.0); m1 * m2];
            let mut col = vec![Complex64::new(0.0, 0.0); ax1.n];
            for k2 in 0..m2 {
                for j1 in 0..ax1.n {
                    col[j1] = t[j1 * m2 + k2];
                }
                let r = axis_transform(&ax1, &phase.q_axes[0], &phase.p_axes[0], hbar, &col);
                for (k1, v) in r.into_iter().enumerate() {
                    out[k1 * m2 + k2] = v;
                }
            }
            out
        }
    }
}

/// Husimi density on a phase grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HusimiField {
    pub phase_grid: PhaseGrid,
    pub hbar: f64,
    pub density: Vec<f64>,
    /// `dq dp / (2 pi hbar)^dim`.
    pub weight: f64,
    /// `sum density * weight`.
    pub mass: f64,
    /// Set when the mass falls below [`LOW_MASS`].
    pub low_mass_warning: bool,
}

impl HusimiField {
    /// Phase node of largest density.
    pub fn argmax(&self) -> ([f64; 2], [f64; 2]) {
        let mut best = 0;
        for (i, v) in self.density.iter().enumerate() {
            if *v > self.density[best] {
                best = i;
            }
        }
        self.phase_grid.point(best)
    }

    /// `sum f * density * weight` for `f` sampled on the phase grid.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().zip(&self.density).map(|(a, b)| a * b).sum::<f64>() * self.weight
    }
}

fn validate_state<T>(
    psi: &[T],
    grid: &Grid,
    hbar: f64,
    phase: &PhaseGrid,
    norm2: f64,
) -> Result<()> {
    check_hbar(hbar)?;
    if psi.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            got: psi.len(),
        });
    }
    if phase.dim() != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            got: phase.dim(),
        });
    }
    check_resolution(grid, hbar)?;
    if (norm2 - 1.0).abs() > 1e-6 {
        return Err(invalid(
            "psi",
            format!("state must be unit-normalized, squared norm is {norm2}"),
        ));
    }
    Ok(())
}

/// Husimi density of a complex state `psi` (unit norm under the grid weight).
pub fn husimi_complex(
    psi: &[Complex64],
    grid: &Grid,
    hbar: f64,
    phase: &PhaseGrid,
) -> Result<HusimiField> {
    let norm2 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.weight();
    validate_state(psi, grid, hbar, phase, norm2)?;
    let density: Vec<f64> = amplitudes(psi, grid, hbar, phase)
        .into_iter()
        .map(|a| a.norm_sqr())
        .collect();
    let weight = phase.weight(hbar);
    let mass = density.iter().sum::<f64>() * weight;
    Ok(HusimiField {
        phase_grid: phase.clone(),
        hbar,
        density,
        weight,
        mass,
        low_mass_warning: mass < LOW_MASS,
    })
}

/// Husimi density of a real state.
pub fn husimi(psi: &[f64], grid: &Grid, hbar: f64, phase: &PhaseGrid) -> Result<HusimiField> {
    let z: Vec<Complex64> = psi.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    husimi_complex(&z, grid, hbar, phase)
}

/// Fraction of the mass whose phase coordinate `axis` exceeds `threshold`;
/// nodes exactly on the threshold count half.
pub fn half_space_mass(field: &HusimiField, axis: usize, threshold: f64) -> Result<f64> {
    let pg = &field.phase_grid;
    if axis >= 2 * pg.dim() {
        return Err(invalid(
            "axis",
            format!("phase axis {axis} out of range 0..{}", 2 * pg.dim()),
        ));
    }
    let total: f64 = field.density.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroMass);
    }
    let mut above = 0.0;
    for (i, d) in field.density.iter().enumerate() {
        let c = pg.coordinate(i, axis);
        if c > threshold {
            above += d;
        } else if c == threshold {
            above += 0.5 * d;
        }
    }
    Ok(above / total)
}
