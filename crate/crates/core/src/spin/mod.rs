//! Finite spin systems: the Curie-Weiss model in the symmetric (Dicke) sector
//! and the transverse-field Ising chain by exact diagonalization.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::eigensolve::{
    lowest_k_with, Parity, Sector, SolverOptions, DEFAULT_DEGENERACY_THRESHOLD,
};
use crate::error::{invalid, Error, Result};
use crate::lattice::SparseSymmetricOperator;
use crate::potentials::bump_profile;

/// Collective spin operators on the `N + 1` dimensional symmetric sector.
///
/// Basis vector `k` has `k` spins up, so `S_z = k - N/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DickeSector {
    pub n: usize,
    pub sx: DMatrix<f64>,
    pub sz: DMatrix<f64>,
}

impl DickeSector {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySystem);
        }
        let dim = n + 1;
        let half = n as f64 / 2.0;
        let mut sx = DMatrix::zeros(dim, dim);
        let mut sz = DMatrix::zeros(dim, dim);
        for k in 0..dim {
            sz[(k, k)] = k as f64 - half;
            if k + 1 < dim {
                let raise = (((n - k) * (k + 1)) as f64).sqrt();
                sx[(k + 1, k)] = 0.5 * raise;
                sx[(k, k + 1)] = 0.5 * raise;
            }
        }
        Ok(Self { n, sx, sz })
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }

    /// `S_y = (S_+ - S_-) / 2i`.
    pub fn sy(&self) -> DMatrix<Complex64> {
        let dim = self.dim();
        let mut sy = DMatrix::zeros(dim, dim);
        for k in 0..self.n {
            let raise = 0.5 * (((self.n - k) * (k + 1)) as f64).sqrt();
            sy[(k + 1, k)] = Complex64::new(0.0, -raise);
            sy[(k, k + 1)] = Complex64::new(0.0, raise);
        }
        sy
    }

    /// Casimir `S_x^2 + S_y^2 + S_z^2`.
    pub fn casimir(&self) -> DMatrix<f64> {
        let sy = self.sy();
        let sy2 = (&sy * &sy).map(|z| z.re);
        &self.sx * &self.sx + sy2 + &self.sz * &self.sz
    }
}

/// Curie-Weiss Hamiltonian `-(J/2N) (sum sigma_3)^2 - B sum sigma_1` on the
/// Dicke sector, with the `i = j` terms of the double sum included.
pub fn cw_hamiltonian(n: usize, j: f64, b: f64) -> Result<DMatrix<f64>> {
    check_couplings(j, b)?;
    let d = DickeSector::new(n)?;
    Ok(cw_from_sector(&d, j, b))
}

fn cw_from_sector(d: &DickeSector, j: f64, b: f64) -> DMatrix<f64> {
    let n = d.n as f64;
    &d.sz * &d.sz * (-2.0 * j / n) - &d.sx * (2.0 * b)
}

fn check_couplings(j: f64, b: f64) -> Result<()> {
    if !j.is_finite() {
        return Err(invalid("J", "must be finite"));
    }
    if !(b.is_finite() && b >= 0.0) {
        return Err(invalid("B", "must be finite and nonnegative"));
    }
    Ok(())
}

/// Diagonal perturbation in the `S_z` basis, a bump in the normalized
/// magnetization `m = 2k/N - 1`. The odd variant subtracts the mirrored bump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinFlea {
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub odd: bool,
}

impl Default for SpinFlea {
    fn default() -> Self {
        Self {
            b: 0.65,
            c: 0.2,
            d: 0.1,
            odd: true,
        }
    }
}

impl SpinFlea {
    pub fn eval(&self, m: f64) -> f64 {
        let up = bump_profile(m - self.b, self.c);
        if self.odd {
            self.d * (up - bump_profile(m + self.b, self.c))
        } else {
            self.d * up
        }
    }

    /// The same flea with the height negated.
    pub fn flipped(&self) -> Self {
        Self {
            d: -self.d,
            ..*self
        }
    }

    /// Rejects fleas whose support touches a classical minimum `m = ±sqrt(1 - (B/J)^2)`.
    pub fn validate(&self, j: f64, b: f64) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite() && self.b.is_finite() && self.d.is_finite()) {
            return Err(Error::InvalidFlea(format!(
                "spin flea needs finite b, d and a positive width, got b={}, c={}, d={}",
                self.b, self.c, self.d
            )));
        }
        let minima = cw_classical_minima(j, b);
        for p in &minima {
            for center in [self.b, -self.b] {
                if !self.odd && center != self.b {
                    continue;
                }
                if (p.z - center).abs() < self.c {
                    return Err(Error::InvalidFlea(format!(
                        "spin flea support ({}, {}) contains the classical minimum m = {}",
                        center - self.c,
                        center + self.c,
                        p.z
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Expectation of the normalized spin vector `2S/N` and of `(2S_z/N)^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagnetizationPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub z2: f64,
}

impl MagnetizationPoint {
    pub fn norm_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CwGround {
    pub energy: f64,
    /// Ground state in the Dicke basis, unit norm, largest entry positive.
    pub state: Vec<f64>,
    pub point: MagnetizationPoint,
    /// `E_1 - E_0`; without a flea, the odd minus the even sector ground energy.
    pub gap: f64,
    pub degenerate: bool,
}

fn sector_basis(n: usize, parity: Parity) -> DMatrix<f64> {
    let dim = n + 1;
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let mut cols: Vec<DVector<f64>> = Vec::new();
    for k in 0..dim {
        let m = n - k;
        if k < m {
            let mut v = DVector::zeros(dim);
            v[k] = s;
            v[m] = if parity == Parity::Even { s } else { -s };
            cols.push(v);
        } else if k == m && parity == Parity::Even {
            let mut v = DVector::zeros(dim);
            v[k] = 1.0;
            cols.push(v);
        }
    }
    DMatrix::from_columns(&cols)
}

fn lowest_dense(h: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = h.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_columns(
        &order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    (values, vectors)
}

fn magnetization(d: &DickeSector, v: &DVector<f64>) -> MagnetizationPoint {
    let n = d.n as f64;
    let x = v.dot(&(&d.sx * v)) * 2.0 / n;
    let z = v.dot(&(&d.sz * v)) * 2.0 / n;
    let z2 = v
        .iter()
        .enumerate()
        .map(|(k, a)| a * a * (2.0 * d.sz[(k, k)] / n).powi(2))
        .sum();
    MagnetizationPoint { x, y: 0.0, z, z2 }
}

/// Ground state of the Curie-Weiss model in the Dicke sector, optionally
/// perturbed by a spin flea.
pub fn cw_ground(n: usize, j: f64, b: f64, flea: Option<&SpinFlea>) -> Result<CwGround> {
    check_couplings(j, b)?;
    let d = DickeSector::new(n)?;
    let mut h = cw_from_sector(&d, j, b);
    let (energy, mut v, gap) = match flea {
        Some(f) => {
            f.validate(j, b)?;
            for k in 0..=n {
                h[(k, k)] += f.eval(2.0 * k as f64 / n as f64 - 1.0);
            }
            let (values, vectors) = lowest_dense(&h);
            let gap = if values.len() > 1 {
                values[1] - values[0]
            } else {
                f64::INFINITY
            };
            (values[0], vectors.column(0).into_owned(), gap)
        }
        None => {
            let ue = sector_basis(n, Parity::Even);
            let (ve, xe) = lowest_dense(&(ue.transpose() * &h * &ue));
            let uo = sector_basis(n, Parity::Odd);
            let gap = if uo.ncols() > 0 {
                let (vo, _) = lowest_dense(&(uo.transpose() * &h * &uo));
                vo[0] - ve[0]
            } else {
                f64::INFINITY
            };
            (ve[0], &ue * xe.column(0), gap)
        }
    };
    let nrm = v.norm();
    v /= nrm;
    let (imax, _) = v.iter().enumerate().fold((0, 0.0f64), |acc, (i, a)| {
        if a.abs() > acc.1 {
            (i, a.abs())
        } else {
            acc
        }
    });
    if v[imax] < 0.0 {
        v.neg_mut();
    }
    let point = magnetization(&d, &v);
    Ok(CwGround {
        energy,
        state: v.iter().copied().collect(),
        point,
        gap,
        degenerate: gap <= DEFAULT_DEGENERACY_THRESHOLD * energy.abs().max(1.0),
    })
}

/// Minima of `-(J z^2 / 2 + B x)` on the unit ball: two mirror points for
/// `B < J`, merging into `(1, 0, 0)` for `B >= J`.
pub fn cw_classical_minima(j: f64, b: f64) -> Vec<MagnetizationPoint> {
    let r = if j > 0.0 { b / j } else { f64::INFINITY };
    if r >= 1.0 {
        return vec![MagnetizationPoint {
            x: 1.0,
            y: 0.0,
            z: 0.0,
            z2: 0.0,
        }];
    }
    let z = (1.0 - r * r).sqrt();
    [z, -z]
        .iter()
        .map(|&z| MagnetizationPoint {
            x: r,
            y: 0.0,
            z,
            z2: z * z,
        })
        .collect()
}

/// Largest supported chain length.
pub const MAX_CHAIN: usize = 14;

/// Fields with `|epsilon|` below this are treated as exactly zero.
pub const EPSILON_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChainBoundary {
    #[default]
    Periodic,
    Open,
}

/// `-J sum sigma_3(j) sigma_3(j+1) - B sum sigma_1(j) + epsilon sum sigma_3(j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsingChain {
    pub n: usize,
    pub j: f64,
    pub b: f64,
    pub epsilon: f64,
    pub bc: ChainBoundary,
}

impl IsingChain {
    pub fn new(n: usize, j: f64, b: f64, epsilon: f64, bc: ChainBoundary) -> Result<Self> {
        if n == 0 || n > MAX_CHAIN {
            return Err(Error::ChainLength(n));
        }
        if !(j.is_finite() && b.is_finite() && epsilon.is_finite()) {
            return Err(invalid("chain", "couplings must be finite"));
        }
        Ok(Self {
            n,
            j,
            b,
            epsilon,
            bc,
        })
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// The field after applying [`EPSILON_FLOOR`].
    pub fn effective_epsilon(&self) -> f64 {
        if self.epsilon.abs() < EPSILON_FLOOR {
            0.0
        } else {
            self.epsilon
        }
    }

    fn bonds(&self) -> usize {
        match self.bc {
            ChainBoundary::Periodic => self.n,
            ChainBoundary::Open => self.n - 1,
        }
    }

    /// Bit `s` of a basis index set means spin `s` points up.
    pub fn hamiltonian(&self) -> Result<SparseSymmetricOperator> {
        let dim = self.dim();
        let eps = self.effective_epsilon();
        let mut t = Vec::with_capacity(dim * (self.n + 1));
        for state in 0..dim {
            let spin = |s: usize| if state >> s & 1 == 1 { 1.0 } else { -1.0 };
            let mut diag = 0.0;
            for s in 0..self.bonds() {
                diag -= self.j * spin(s) * spin((s + 1) % self.n);
            }
            for s in 0..self.n {
                diag += eps * spin(s);
                if self.b != 0.0 {
                    t.push((state, state ^ (1 << s), -self.b));
                }
            }
            t.push((state, state, diag));
        }
        SparseSymmetricOperator::from_triplets(dim, t)
    }
}

/// Ground-state magnetization `<(1/N) sum sigma_3>` of the chain.
pub fn ising_ground_magnetization(chain: &IsingChain) -> Result<f64> {
    let h = chain.hamiltonian()?;
    let tol = 64.0 * f64::EPSILON * h.norm_bound().max(1.0);
    let mut opts = SolverOptions::default().with_tol(tol);
    if chain.effective_epsilon() == 0.0 {
        let full = chain.dim() - 1;
        let map = (0..chain.dim()).map(|i| full ^ i).collect();
        opts = opts.with_sector(Sector::new(map, Parity::Even)?);
    }
    let spec = lowest_k_with(&h, 1, &opts)?;
    let psi = spec.ground_state();
    let mut m = 0.0;
    let mut total = 0.0;
    for (state, a) in psi.iter().enumerate() {
        let up = (state as u32).count_ones() as f64;
        let w = a * a;
        total += w;
        m += w * (2.0 * up - chain.n as f64);
    }
    Ok(m / (total * chain.n as f64))
}

/// Magnetization table over chain lengths and fields with trend summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderOfLimits {
    pub n_list: Vec<usize>,
    pub epsilon_list: Vec<f64>,
    /// `m[i][k]` for `n_list[i]` and `epsilon_list[k]`.
    pub m: Vec<Vec<f64>>,
    /// Per row: `|m|` never increases as `|epsilon|` decreases.
    pub rows_decay: Vec<bool>,
    /// Per column: `|m|` never decreases as `N` grows.
    pub columns_nondecreasing: Vec<bool>,
}

impl OrderOfLimits {
    /// Summarizes a precomputed table.
    pub fn from_table(
        n_list: Vec<usize>,
        epsilon_list: Vec<f64>,
        m: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if m.len() != n_list.len() || m.iter().any(|r| r.len() != epsilon_list.len()) {
            return Err(invalid("table", "shape does not match the parameter lists"));
        }
        let mut eps_order: Vec<usize> = (0..epsilon_list.len()).collect();
        eps_order.sort_by(|&a, &b| epsilon_list[b].abs().total_cmp(&epsilon_list[a].abs()));
        let mut n_order: Vec<usize> = (0..n_list.len()).collect();
        n_order.sort_by_key(|&i| n_list[i]);
        let rows_decay = m
            .iter()
            .map(|row| {
                eps_order
                    .windows(2)
                    .all(|w| row[w[1]].abs() <= row[w[0]].abs())
            })
            .collect();
        let columns_nondecreasing = (0..epsilon_list.len())
            .map(|k| {
                n_order
                    .windows(2)
                    .all(|w| m[w[1]][k].abs() >= m[w[0]][k].abs())
            })
            .collect();
        Ok(Self {
            n_list,
            epsilon_list,
            m,
            rows_decay,
            columns_nondecreasing,
        })
    }

    pub fn all_rows_decay(&self) -> bool {
        self.rows_decay.iter().all(|&b| b)
    }

    pub fn all_columns_nondecreasing(&self) -> bool {
        self.columns_nondecreasing.iter().all(|&b| b)
    }
}

/// Computes `m(N, epsilon)` for every pair, sequentially.
pub fn order_of_limits_scan(
    n_list: &[usize],
    epsilon_list: &[f64],
    j: f64,
    b: f64,
    bc: ChainBoundary,
) -> Result<OrderOfLimits> {
    if n_list.is_empty() || epsilon_list.is_empty() {
        return Err(invalid("scan", "chain lengths and fields must be nonempty"));
    }
    let mut table = Vec::with_capacity(n_list.len());
    for (i, &n) in n_list.iter().enumerate() {
        let mut row = Vec::with_capacity(epsilon_list.len());
        for (k, &eps) in epsilon_list.iter().enumerate() {
            let m = IsingChain::new(n, j, b, eps, bc)
                .and_then(|c| ising_ground_magnetization(&c))
                .map_err(|e| Error::Sweep {
                    index: i * epsilon_list.len() + k,
                    source: alloc::boxed::Box::new(e),
                })?;
            row.push(m);
        }
        table.push(row);
    }
    OrderOfLimits::from_table(n_list.to_vec(), epsilon_list.to_vec(), table)
}
