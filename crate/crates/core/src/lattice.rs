//! Uniform grids, finite-difference Laplacians and assembled Schrödinger
//! operators `H = -hbar^2 Δ + V (+ δV)`.
//!
//! Node coordinates are never stored: node `i` of an axis sits at
//! `min + i * h`. Periodic axes exclude the right end point, which is
//! identified with `min`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::potentials::{self, FleaSpec, PotentialSpec};

/// Boundary condition applied to every axis of a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Dirichlet,
    Periodic,
}

/// One uniformly sampled axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Axis {
    fn validate(&self, name: &str) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) || self.min >= self.max {
            return Err(Error::InvalidGrid(format!(
                "{name}: need min < max, got [{}, {}]",
                self.min, self.max
            )));
        }
        if self.n < 3 {
            return Err(Error::InvalidGrid(format!(
                "{name}: need at least 3 nodes, got {}",
                self.n
            )));
        }
        Ok(())
    }

    pub fn spacing(&self, bc: Boundary) -> f64 {
        match bc {
            Boundary::Dirichlet => (self.max - self.min) / (self.n - 1) as f64,
            Boundary::Periodic => (self.max - self.min) / self.n as f64,
        }
    }

    #[inline]
    pub fn node(&self, i: usize, bc: Boundary) -> f64 {
        self.min + i as f64 * self.spacing(bc)
    }

    pub fn length(&self) -> f64 {
        self.max - self.min
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    axis: Axis,
    bc: Boundary,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n: usize, bc: Boundary) -> Result<Self> {
        let axis = Axis {
            min: x_min,
            max: x_max,
            n,
        };
        axis.validate("x")?;
        Ok(Self { axis, bc })
    }

    /// `[-2, 2]`, Dirichlet, 2001 nodes.
    pub fn double_well_default() -> Self {
        Self::new(-2.0, 2.0, 2001, Boundary::Dirichlet).expect("static grid")
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }
    pub fn boundary(&self) -> Boundary {
        self.bc
    }
    pub fn len(&self) -> usize {
        self.axis.n
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn spacing(&self) -> f64 {
        self.axis.spacing(self.bc)
    }
    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        self.axis.node(i, self.bc)
    }
    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.axis.n).map(move |i| self.node(i))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D {
    x: Axis,
    y: Axis,
    bc: Boundary,
}

impl Grid2D {
    pub fn new(x: Axis, y: Axis, bc: Boundary) -> Result<Self> {
        x.validate("x")?;
        y.validate("y")?;
        Ok(Self { x, y, bc })
    }

    /// Square `[min, max]^2` with `n` nodes per axis.
    pub fn square(min: f64, max: f64, n: usize, bc: Boundary) -> Result<Self> {
        let a = Axis { min, max, n };
        Self::new(a, a, bc)
    }

    pub fn x_axis(&self) -> Axis {
        self.x
    }
    pub fn y_axis(&self) -> Axis {
        self.y
    }
    pub fn boundary(&self) -> Boundary {
        self.bc
    }
    pub fn nx(&self) -> usize {
        self.x.n
    }
    pub fn ny(&self) -> usize {
        self.y.n
    }
    pub fn len(&self) -> usize {
        self.x.n * self.y.n
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn spacing(&self) -> (f64, f64) {
        (self.x.spacing(self.bc), self.y.spacing(self.bc))
    }
    /// Row-major flattening, `x` index slowest.
    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        ix * self.y.n + iy
    }
    #[inline]
    pub fn split(&self, idx: usize) -> (usize, usize) {
        (idx / self.y.n, idx % self.y.n)
    }
    #[inline]
    pub fn node(&self, idx: usize) -> [f64; 2] {
        let (ix, iy) = self.split(idx);
        [self.x.node(ix, self.bc), self.y.node(iy, self.bc)]
    }
}

/// Either grid; the domain of every wavefunction.
#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    One(Grid1D),
    Two(Grid2D),
}

impl From<Grid1D> for Grid {
    fn from(g: Grid1D) -> Self {
        Grid::One(g)
    }
}

impl From<Grid2D> for Grid {
    fn from(g: Grid2D) -> Self {
        Grid::Two(g)
    }
}

impl Grid {
    pub fn dim(&self) -> usize {
        match self {
            Grid::One(_) => 1,
            Grid::Two(_) => 2,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Grid::One(g) => g.len(),
            Grid::Two(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn boundary(&self) -> Boundary {
        match self {
            Grid::One(g) => g.boundary(),
            Grid::Two(g) => g.boundary(),
        }
    }

    /// Quadrature weight `h^dim` of one node.
    pub fn weight(&self) -> f64 {
        match self {
            Grid::One(g) => g.spacing(),
            Grid::Two(g) => {
                let (hx, hy) = g.spacing();
                hx * hy
            }
        }
    }

    /// Largest axis spacing.
    pub fn max_spacing(&self) -> f64 {
        match self {
            Grid::One(g) => g.spacing(),
            Grid::Two(g) => {
                let (hx, hy) = g.spacing();
                hx.max(hy)
            }
        }
    }

    /// Smallest axis spacing.
    pub fn min_spacing(&self) -> f64 {
        match self {
            Grid::One(g) => g.spacing(),
            Grid::Two(g) => {
                let (hx, hy) = g.spacing();
                hx.min(hy)
            }
        }
    }

    /// Coordinates of node `idx`; only the first `dim()` entries are meaningful.
    #[inline]
    pub fn point(&self, idx: usize) -> [f64; 2] {
        match self {
            Grid::One(g) => [g.node(idx), 0.0],
            Grid::Two(g) => g.node(idx),
        }
    }

    /// Mirror map `x -> (min + max) - x` along `axis`, as a node permutation.
    pub fn reflection(&self, axis: usize) -> Result<Vec<usize>> {
        let mirror = |n: usize, i: usize, bc: Boundary| match bc {
            Boundary::Dirichlet => n - 1 - i,
            Boundary::Periodic => (n - i) % n,
        };
        match (self, axis) {
            (Grid::One(g), 0) => Ok((0..g.len()).map(|i| mirror(g.len(), i, g.bc)).collect()),
            (Grid::Two(g), 0 | 1) => Ok((0..g.len())
                .map(|idx| {
                    let (ix, iy) = g.split(idx);
                    if axis == 0 {
                        g.index(mirror(g.nx(), ix, g.bc), iy)
                    } else {
                        g.index(ix, mirror(g.ny(), iy, g.bc))
                    }
                })
                .collect()),
            _ => Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: axis + 1,
            }),
        }
    }
}

/// Real symmetric matrix in compressed-row form.
///
/// Rows are sorted by column; duplicates are summed at construction, so
/// `entries()` yields the canonical `(row, col, value)` ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymmetricOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseSymmetricOperator {
    /// Builds the operator from unordered triplets and checks exact symmetry.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, f64)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidGrid(
                "operator dimension must be positive".into(),
            ));
        }
        for (k, &(r, c, v)) in triplets.iter().enumerate() {
            if r >= dim || c >= dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: r.max(c) + 1,
                });
            }
            if !v.is_finite() {
                return Err(Error::NonFinite { index: k, value: v });
            }
        }
        triplets.sort_unstable_by_key(|t| (t.0, t.1));

        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols: Vec<usize> = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *vals.last_mut().expect("duplicate follows an entry") += v;
                continue;
            }
            cols.push(c);
            vals.push(v);
            row_ptr[r + 1] += 1;
            last = Some((r, c));
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        let op = Self {
            dim,
            row_ptr,
            cols,
            vals,
        };
        if let Some((r, c)) = op.first_asymmetry() {
            return Err(Error::InvalidParameter {
                name: "operator",
                reason: format!("entry ({r}, {c}) differs from its transpose"),
            });
        }
        Ok(op)
    }

    /// Diagonal matrix.
    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::from_triplets(
            diag.len(),
            diag.iter().enumerate().map(|(i, &v)| (i, i, v)).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.vals[k]))
        })
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let (lo, hi) = (self.row_ptr[row], self.row_ptr[row + 1]);
        match self.cols[lo..hi].binary_search(&col) {
            Ok(k) => self.vals[lo + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    fn first_asymmetry(&self) -> Option<(usize, usize)> {
        self.entries()
            .find(|&(r, c, v)| r != c && self.get(c, r) != v)
            .map(|(r, c, _)| (r, c))
    }

    /// Exact entry-level symmetry check.
    pub fn is_symmetric(&self) -> bool {
        self.first_asymmetry().is_none()
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *out = acc;
        }
    }

    /// Gershgorin bound on the spectral radius; used as `‖A‖` in tolerances.
    pub fn norm_bound(&self) -> f64 {
        (0..self.dim)
            .map(|r| {
                self.vals[self.row_ptr[r]..self.row_ptr[r + 1]]
                    .iter()
                    .map(|v| v.abs())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// Gershgorin interval `[lo, hi]` containing the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for r in 0..self.dim {
            let mut d = 0.0;
            let mut off = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.cols[k] == r {
                    d = self.vals[k];
                } else {
                    off += self.vals[k].abs();
                }
            }
            lo = lo.min(d - off);
            hi = hi.max(d + off);
        }
        (lo, hi)
    }

    /// `A + diag(d)`.
    pub fn add_diagonal(&self, d: &[f64]) -> Result<Self> {
        if d.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: d.len(),
            });
        }
        let mut t: Vec<(usize, usize, f64)> = self.entries().collect();
        t.extend(d.iter().enumerate().map(|(i, &v)| (i, i, v)));
        Self::from_triplets(self.dim, t)
    }

    /// `alpha * A`.
    pub fn scaled(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.vals {
            *v *= alpha;
        }
        out
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
        }
        m
    }
}

fn check_hbar(hbar: f64) -> Result<()> {
    if hbar > 0.0 && hbar.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidHbar(hbar))
    }
}

fn push_axis_stencil(
    t: &mut Vec<(usize, usize, f64)>,
    n: usize,
    bc: Boundary,
    coupling: f64,
    index: impl Fn(usize) -> usize,
    pinned: impl Fn(usize) -> bool,
) {
    for i in 0..n {
        t.push((index(i), index(i), 2.0 * coupling));
    }
    let mut couple = |a: usize, b: usize| {
        let (ia, ib) = (index(a), index(b));
        if !pinned(ia) && !pinned(ib) {
            t.push((ia, ib, -coupling));
            t.push((ib, ia, -coupling));
        }
    };
    for i in 0..n - 1 {
        couple(i, i + 1);
    }
    if bc == Boundary::Periodic {
        couple(n - 1, 0);
    }
}

/// Second-order central-difference `-hbar^2 Δ` on `grid`.
///
/// Dirichlet grids pin the wavefunction to zero on the boundary nodes: every
/// coupling that touches one is dropped, so those nodes decouple and carry only
/// their diagonal entry. Periodic grids wrap the couplings.
pub fn build_laplacian(grid: &Grid, hbar: f64) -> Result<SparseSymmetricOperator> {
    check_hbar(hbar)?;
    let hb2 = hbar * hbar;
    let mut t = Vec::new();
    match grid {
        Grid::One(g) => {
            let h = g.spacing();
            let n = g.len();
            let dirichlet = g.boundary() == Boundary::Dirichlet;
            push_axis_stencil(
                &mut t,
                n,
                g.boundary(),
                hb2 / (h * h),
                |i| i,
                |i| dirichlet && (i == 0 || i == n - 1),
            );
        }
        Grid::Two(g) => {
            let (hx, hy) = g.spacing();
            let (nx, ny) = (g.nx(), g.ny());
            let dirichlet = g.boundary() == Boundary::Dirichlet;
            let pinned = |idx: usize| {
                let (ix, iy) = g.split(idx);
                dirichlet && (ix == 0 || iy == 0 || ix == nx - 1 || iy == ny - 1)
            };
            t.reserve(5 * g.len());
            for iy in 0..ny {
                push_axis_stencil(
                    &mut t,
                    nx,
                    g.boundary(),
                    hb2 / (hx * hx),
                    |ix| g.index(ix, iy),
                    pinned,
                );
            }
            for ix in 0..nx {
                push_axis_stencil(
                    &mut t,
                    ny,
                    g.boundary(),
                    hb2 / (hy * hy),
                    |iy| g.index(ix, iy),
                    pinned,
                );
            }
        }
    }
    SparseSymmetricOperator::from_triplets(grid.len(), t)
}

/// Potential (plus flea) sampled on every node.
pub fn sample_potential(
    grid: &Grid,
    potential: &PotentialSpec,
    flea: Option<&FleaSpec>,
) -> Result<Vec<f64>> {
    let mut v = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let p = grid.point(i);
        let mut value = potentials::eval_potential(potential, &p[..grid.dim()])?;
        if let Some(f) = flea {
            value += f.value_at(grid, i)?;
        }
        if !value.is_finite() {
            return Err(Error::NonFinite { index: i, value });
        }
        v.push(value);
    }
    Ok(v)
}

/// `H = -hbar^2 Δ + diag(V + δV)`; a present flea must pass `validate_flea`.
pub fn assemble_hamiltonian(
    grid: &Grid,
    hbar: f64,
    potential: &PotentialSpec,
    flea: Option<&FleaSpec>,
) -> Result<SparseSymmetricOperator> {
    if let Some(f) = flea {
        let report = potentials::validate_flea(potential, f, grid)?;
        if !report.is_valid() {
            return Err(Error::InvalidFlea(report.describe()));
        }
    }
    let kinetic = build_laplacian(grid, hbar)?;
    let v = sample_potential(grid, potential, flea)?;
    kinetic.add_diagonal(&v)
}
