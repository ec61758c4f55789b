//! Lowest eigenpairs of sparse symmetric operators.
//!
//! [`lowest_k`] runs a block thick-restart Lanczos iteration with full
//! reorthogonalization. Every returned pair is certified against the operator:
//! `|H v - λ v| <= tol * max(1, |λ|)` for the Euclidean-unit vector `v`.
//! Eigenvectors are then rescaled to unit norm under the quadrature weight
//! given in [`SolverOptions::weight`].
//!
//! Near-degenerate pairs related by an involutive symmetry (mirror images in
//! a double well, spin flips) split by amounts far below any practical
//! residual tolerance. A [`Sector`] restricts the iteration to the even or odd
//! subspace of such a symmetry so each member of the pair is resolved.

mod krylov;
mod shift;

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::lattice::SparseSymmetricOperator;

/// Default seed of the start block.
pub const DEFAULT_SEED: u64 = 0x5EED;
/// Default residual tolerance.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Default restart budget.
pub const DEFAULT_MAX_RESTARTS: usize = 10_000;
/// Default relative threshold of [`degeneracy_check`].
pub const DEFAULT_DEGENERACY_THRESHOLD: f64 = 1e-10;

/// Symmetric linear map applied matrix-free.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]) -> Result<()>;
}

impl LinearOperator for SparseSymmetricOperator {
    fn dim(&self) -> usize {
        SparseSymmetricOperator::dim(self)
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        SparseSymmetricOperator::apply(self, x, y);
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

/// Eigenspace `R v = ±v` of an involutive index permutation `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sector {
    map: Vec<usize>,
    parity: Parity,
}

impl Sector {
    /// `map` must satisfy `map[map[i]] == i`.
    pub fn new(map: Vec<usize>, parity: Parity) -> Result<Self> {
        let n = map.len();
        for (i, &j) in map.iter().enumerate() {
            if j >= n || map[j] != i {
                return Err(invalid(
                    "sector",
                    format!("index map is not an involution at {i}"),
                ));
            }
        }
        Ok(Self { map, parity })
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn with_parity(&self, parity: Parity) -> Self {
        Self {
            map: self.map.clone(),
            parity,
        }
    }

    /// Applies the projector `(1 ± R) / 2` in place.
    pub fn project(&self, v: &mut [f64]) {
        for i in 0..v.len() {
            let j = self.map[i];
            match (i.cmp(&j), self.parity) {
                (core::cmp::Ordering::Less, Parity::Even) => {
                    let m = 0.5 * (v[i] + v[j]);
                    v[i] = m;
                    v[j] = m;
                }
                (core::cmp::Ordering::Less, Parity::Odd) => {
                    let d = 0.5 * (v[i] - v[j]);
                    v[i] = d;
                    v[j] = -d;
                }
                (core::cmp::Ordering::Equal, Parity::Odd) => v[i] = 0.0,
                _ => {}
            }
        }
    }

    /// Entry-level check of `R A R = A` up to rounding in the matrix entries.
    fn commutes_with(&self, op: &SparseSymmetricOperator) -> bool {
        let tol = 1e-12 * op.norm_bound().max(1.0);
        op.entries()
            .all(|(r, c, v)| (op.get(self.map[r], self.map[c]) - v).abs() <= tol)
    }
}

/// Spectral transformation used by [`lowest_k_with`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ShiftMode {
    #[default]
    Off,
    /// Picks a shift below the spectrum from a loose preliminary solve.
    Auto,
    /// Iterates with `(H - sigma)^{-1}`; `sigma` must lie below the spectrum.
    At(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_restarts: usize,
    pub seed: u64,
    /// Block size; defaults to `max(2, k + 1)`.
    pub block: Option<usize>,
    /// Ritz vectors kept across a restart.
    pub keep: Option<usize>,
    /// Largest basis before a restart.
    pub max_basis: Option<usize>,
    pub shift: ShiftMode,
    pub sector: Option<Sector>,
    /// Quadrature weight `h^dim` of the inner product eigenvectors are normalized in.
    pub weight: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_restarts: DEFAULT_MAX_RESTARTS,
            seed: DEFAULT_SEED,
            block: None,
            keep: None,
            max_basis: None,
            shift: ShiftMode::Off,
            sector: None,
            weight: 1.0,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }
    pub fn with_sector(mut self, sector: Sector) -> Self {
        self.sector = Some(sector);
        self
    }
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn krylov_config(&self, k: usize, n: usize) -> krylov::KrylovConfig {
        let block = self.block.unwrap_or((k + 1).max(2));
        let keep = self.keep.unwrap_or((2 * k).max(k + 8) + block);
        let max_basis = self.max_basis.unwrap_or((6 * keep).max(60)).min(n);
        krylov::KrylovConfig {
            tol: self.tol,
            block,
            keep,
            max_basis,
            max_restarts: self.max_restarts,
            seed: self.seed,
        }
    }
}

/// `requested` raised to the rounding floor `64 eps |H|` of the operator.
pub fn attainable_tol(op: &SparseSymmetricOperator, requested: f64) -> f64 {
    requested.max(64.0 * f64::EPSILON * op.norm_bound())
}

/// Certified low-lying eigenpairs in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Unit norm under `sum |v_i|^2 * weight`.
    pub eigenvectors: Vec<Vec<f64>>,
    /// `|H v - λ v|` for the Euclidean-unit eigenvector.
    pub residuals: Vec<f64>,
    /// `E1 - E0`, absent when a single pair was requested.
    pub gap: Option<f64>,
    pub weight: f64,
    pub restarts: usize,
}

impl Spectrum {
    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn ground_state(&self) -> &[f64] {
        &self.eigenvectors[0]
    }

    /// Weighted inner product of eigenvectors `i` and `j`.
    pub fn overlap(&self, i: usize, j: usize) -> f64 {
        krylov::dot(&self.eigenvectors[i], &self.eigenvectors[j]) * self.weight
    }
}

fn validate_request(dim: usize, k: usize, opts: &SolverOptions) -> Result<()> {
    if k == 0 || k >= dim {
        return Err(Error::TooManyEigenpairs { k, dim });
    }
    if !(opts.tol > 0.0 && opts.tol.is_finite()) {
        return Err(invalid(
            "tol",
            format!("must be positive, got {}", opts.tol),
        ));
    }
    if !(opts.weight > 0.0 && opts.weight.is_finite()) {
        return Err(invalid(
            "weight",
            format!("must be positive, got {}", opts.weight),
        ));
    }
    if let Some(s) = &opts.sector {
        if s.map.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: s.map.len(),
            });
        }
    }
    Ok(())
}

/// Lowest `k` eigenpairs with default options and tolerance `tol`.
pub fn lowest_k(op: &SparseSymmetricOperator, k: usize, tol: f64) -> Result<Spectrum> {
    lowest_k_with(op, k, &SolverOptions::default().with_tol(tol))
}

/// Lowest `k` eigenpairs of `op` under `opts`.
pub fn lowest_k_with(
    op: &SparseSymmetricOperator,
    k: usize,
    opts: &SolverOptions,
) -> Result<Spectrum> {
    let n = op.dim();
    validate_request(n, k, opts)?;
    if let Some(s) = &opts.sector {
        if !s.commutes_with(op) {
            return Err(invalid(
                "sector",
                "operator does not commute with the symmetry",
            ));
        }
    }
    let pairs = match opts.shift {
        ShiftMode::Off => krylov::smallest(op, k, opts.krylov_config(k, n), opts.sector.as_ref())?,
        ShiftMode::At(sigma) => shift::smallest_shifted(op, k, sigma, opts)?,
        ShiftMode::Auto => {
            let sigma = shift::auto_shift(op, k, opts)?;
            shift::smallest_shifted(op, k, sigma, opts)?
        }
    };
    Ok(finish(pairs, opts.weight))
}

/// Lowest `k` eigenpairs of a matrix-free operator (no shift-invert).
pub fn lowest_k_operator<A: LinearOperator + ?Sized>(
    op: &A,
    k: usize,
    opts: &SolverOptions,
) -> Result<Spectrum> {
    validate_request(op.dim(), k, opts)?;
    let pairs = krylov::smallest(op, k, opts.krylov_config(k, op.dim()), opts.sector.as_ref())?;
    Ok(finish(pairs, opts.weight))
}

fn finish(pairs: krylov::RitzPairs, weight: f64) -> Spectrum {
    let scale = 1.0 / weight.sqrt();
    let eigenvectors = pairs
        .vectors
        .into_iter()
        .map(|mut v| {
            let mut imax = 0;
            for (i, x) in v.iter().enumerate() {
                if x.abs() > v[imax].abs() {
                    imax = i;
                }
            }
            let s = if v[imax] < 0.0 { -scale } else { scale };
            v.iter_mut().for_each(|x| *x *= s);
            v
        })
        .collect();
    let gap = (pairs.values.len() >= 2).then(|| (pairs.values[1] - pairs.values[0]).max(0.0));
    Spectrum {
        eigenvalues: pairs.values,
        eigenvectors,
        residuals: pairs.residuals,
        gap,
        weight,
        restarts: pairs.restarts,
    }
}

/// True when `E1 - E0 <= rel_threshold * max(1, |E0|)`; false for single-pair spectra.
pub fn degeneracy_check(spec: &Spectrum, rel_threshold: f64) -> bool {
    match spec.gap {
        Some(g) => g <= rel_threshold * spec.eigenvalues[0].abs().max(1.0),
        None => false,
    }
}

/// Ordinary least-squares line `y = slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least-squares fit; `None` for fewer than two points or constant `xs`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum();
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Some(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

/// One Hamiltonian of a gap sweep, optionally with its mirror symmetry.
#[derive(Debug, Clone)]
pub struct GapProblem {
    pub op: SparseSymmetricOperator,
    /// When present, the gap is the odd-sector minus the even-sector ground energy.
    pub reflection: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapRow {
    pub hbar: f64,
    pub e0: f64,
    pub e1: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapScaling {
    pub rows: Vec<GapRow>,
    /// `ln gap` against `1 / hbar`.
    pub exponential: Option<LinearFit>,
    /// `ln gap` against `ln hbar`.
    pub power: Option<LinearFit>,
}

/// Minimum `R^2` of an accepted exponential fit.
pub const EXPONENTIAL_FIT_MIN_R2: f64 = 0.99;

impl GapScaling {
    /// The exponential law is accepted when its fit is tight and beats the power law.
    pub fn exponential_accepted(&self) -> bool {
        match (self.exponential, self.power) {
            (Some(e), Some(p)) => {
                e.r_squared >= EXPONENTIAL_FIT_MIN_R2 && e.r_squared > p.r_squared
            }
            (Some(e), None) => e.r_squared >= EXPONENTIAL_FIT_MIN_R2,
            _ => false,
        }
    }

    /// Builds the table from rows computed elsewhere and fits it.
    pub fn from_rows(rows: Vec<GapRow>) -> Self {
        let mut table = Self {
            rows,
            exponential: None,
            power: None,
        };
        table.fit();
        table
    }

    fn fit(&mut self) {
        let ok: Vec<&GapRow> = self.rows.iter().filter(|r| r.gap > 0.0).collect();
        if ok.len() < 2 || ok.len() != self.rows.len() {
            self.exponential = None;
            self.power = None;
            return;
        }
        let ln_gap: Vec<f64> = ok.iter().map(|r| r.gap.ln()).collect();
        let inv: Vec<f64> = ok.iter().map(|r| 1.0 / r.hbar).collect();
        let ln_h: Vec<f64> = ok.iter().map(|r| r.hbar.ln()).collect();
        self.exponential = linear_fit(&inv, &ln_gap);
        self.power = linear_fit(&ln_h, &ln_gap);
    }
}

/// Failure of a sweep, carrying the rows computed before it.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialFailure<T> {
    pub partial: T,
    pub error: Error,
}

/// Spectral gap at each `hbar` (descending) and fits of its decay.
pub fn gap_scaling<F>(
    hbars: &[f64],
    opts: &SolverOptions,
    mut factory: F,
) -> core::result::Result<GapScaling, Box<PartialFailure<GapScaling>>>
where
    F: FnMut(f64) -> Result<GapProblem>,
{
    let mut table = GapScaling {
        rows: Vec::with_capacity(hbars.len()),
        exponential: None,
        power: None,
    };
    let fail = |table: GapScaling, index: usize, error: Error| {
        Box::new(PartialFailure {
            partial: table,
            error: Error::Sweep {
                index,
                source: Box::new(error),
            },
        })
    };
    for (i, &hbar) in hbars.iter().enumerate() {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(fail(table, i, Error::InvalidHbar(hbar)));
        }
        if i > 0 && hbar >= hbars[i - 1] {
            return Err(fail(
                table,
                i,
                invalid("hbars", "values must be strictly descending"),
            ));
        }
        let row = factory(hbar).and_then(|problem| gap_row(hbar, &problem, opts));
        match row {
            Ok(r) => table.rows.push(r),
            Err(e) => return Err(fail(table, i, e)),
        }
    }
    table.fit();
    Ok(table)
}

/// Gap of a single sweep point.
pub fn gap_row(hbar: f64, problem: &GapProblem, opts: &SolverOptions) -> Result<GapRow> {
    match &problem.reflection {
        Some(map) => {
            let even = Sector::new(map.clone(), Parity::Even)?;
            let odd = even.with_parity(Parity::Odd);
            let e = lowest_k_with(&problem.op, 1, &opts.clone().with_sector(even))?;
            let o = lowest_k_with(&problem.op, 1, &opts.clone().with_sector(odd))?;
            let (e0, e1) = (e.eigenvalues[0], o.eigenvalues[0]);
            Ok(GapRow {
                hbar,
                e0: e0.min(e1),
                e1: e0.max(e1),
                gap: (e1 - e0).abs(),
            })
        }
        None => {
            let s = lowest_k_with(&problem.op, 2, opts)?;
            Ok(GapRow {
                hbar,
                e0: s.eigenvalues[0],
                e1: s.eigenvalues[1],
                gap: s.gap.unwrap_or(0.0),
            })
        }
    }
}
