//! Block thick-restart Lanczos with full reorthogonalization.
//!
//! The basis `V` is kept explicitly together with the projected matrix
//! `T = V^T A V`. Each step appends the orthonormalized residual block
//! `(I - V V^T) A V_last`; when the basis is full, the lowest Ritz vectors are
//! kept and the residual block continues the expansion. Residual norms of Ritz
//! pairs are read off the Gram matrix of that block, and converged pairs are
//! certified against the operator before they are returned.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVectorView, DVectorViewMut, SymmetricEigen};
#[allow(unused_imports)]
use num_traits::Float;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::{LinearOperator, Sector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub(crate) struct KrylovConfig {
    pub tol: f64,
    pub block: usize,
    pub keep: usize,
    pub max_basis: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub(crate) struct RitzPairs {
    pub values: Vec<f64>,
    /// Euclidean-unit vectors.
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub restarts: usize,
}

pub(crate) struct UniformRng(ChaCha8Rng);

impl UniformRng {
    pub(crate) fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Fills `v` with samples from `[-1, 1)`.
    pub(crate) fn fill(&mut self, v: &mut [f64]) {
        for x in v.iter_mut() {
            let u = (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            *x = 2.0 * u - 1.0;
        }
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Classical Gram-Schmidt against the first `m` basis columns and `extra`,
/// repeated while a pass removes more than half the norm.
/// Returns the ratio of final to initial norm.
fn orthogonalize(basis: &DMatrix<f64>, m: usize, extra: &[Vec<f64>], w: &mut [f64]) -> f64 {
    let n0 = norm(w);
    if n0 == 0.0 {
        return 0.0;
    }
    let len = w.len();
    let mut prev = n0;
    for _ in 0..3 {
        if m > 0 {
            let vm = basis.columns(0, m);
            let c = vm.tr_mul(&DVectorView::from_slice(w, len));
            DVectorViewMut::from_slice(w, len).gemv(-1.0, &vm, &c, 1.0);
        }
        for q in extra {
            let c = dot(q, w);
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= c * qi;
            }
        }
        let now = norm(w);
        if now > 0.5 * prev {
            return now / n0;
        }
        prev = now;
    }
    norm(w) / n0
}

struct State<'a, A: LinearOperator + ?Sized> {
    op: &'a A,
    sector: Option<&'a Sector>,
    max_basis: usize,
    n: usize,
    basis: DMatrix<f64>,
    t: DMatrix<f64>,
    m: usize,
    last_images: Vec<Vec<f64>>,
    rng: UniformRng,
}

impl<A: LinearOperator + ?Sized> State<'_, A> {
    fn project(&self, v: &mut [f64]) {
        if let Some(s) = self.sector {
            s.project(v);
        }
    }

    /// Orthonormalizes `candidates` against the basis and each other and
    /// appends them; directions that vanish are replaced by random ones.
    fn append(&mut self, candidates: Vec<Vec<f64>>) -> Result<usize> {
        let room = self.max_basis - self.m;
        let mut accepted: Vec<Vec<f64>> = Vec::new();
        for mut w in candidates {
            if accepted.len() == room {
                break;
            }
            self.project(&mut w);
            let mut ratio = orthogonalize(&self.basis, self.m, &accepted, &mut w);
            let mut attempts = 0;
            while ratio < 1e-8 && attempts < 3 {
                self.rng.fill(&mut w);
                self.project(&mut w);
                ratio = orthogonalize(&self.basis, self.m, &accepted, &mut w);
                attempts += 1;
            }
            if ratio < 1e-8 {
                continue;
            }
            let nw = norm(&w);
            w.iter_mut().for_each(|x| *x /= nw);
            accepted.push(w);
        }

        let p = accepted.len();
        let mut images = Vec::with_capacity(p);
        for (j, w) in accepted.iter().enumerate() {
            self.basis.column_mut(self.m + j).copy_from_slice(w);
            let mut aw = vec![0.0; self.n];
            self.op.apply(w, &mut aw)?;
            images.push(aw);
        }
        let m = self.m;
        let total = m + p;
        let vt = self.basis.columns(0, total);
        let mut c = DMatrix::zeros(total, p);
        for (j, aw) in images.iter().enumerate() {
            c.set_column(j, &vt.tr_mul(&DVectorView::from_slice(aw, self.n)));
        }
        for j in 0..p {
            let col = m + j;
            for i in 0..m {
                self.t[(i, col)] = c[(i, j)];
                self.t[(col, i)] = c[(i, j)];
            }
            for jj in 0..p {
                self.t[(m + jj, col)] = 0.5 * (c[(m + jj, j)] + c[(col, jj)]);
            }
        }
        self.m = total;
        self.last_images = images;
        Ok(p)
    }

    fn residual_block(&self) -> Vec<Vec<f64>> {
        self.last_images
            .iter()
            .map(|aw| {
                let mut z = aw.clone();
                orthogonalize(&self.basis, self.m, &[], &mut z);
                z
            })
            .collect()
    }

    fn ritz(&self) -> (Vec<f64>, DMatrix<f64>) {
        let m = self.m;
        let eig = SymmetricEigen::new(self.t.view((0, 0), (m, m)).into_owned());
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut s = DMatrix::zeros(m, m);
        for (j, &i) in order.iter().enumerate() {
            s.set_column(j, &eig.eigenvectors.column(i));
        }
        (values, s)
    }

    fn ritz_vectors(&self, s: &DMatrix<f64>, count: usize) -> DMatrix<f64> {
        self.basis.columns(0, self.m) * s.columns(0, count)
    }

    fn certify(&self, x: &DMatrix<f64>, k: usize) -> Result<RitzPairs> {
        let mut out = RitzPairs {
            values: Vec::with_capacity(k),
            vectors: Vec::with_capacity(k),
            residuals: Vec::with_capacity(k),
            restarts: 0,
        };
        let mut ax = vec![0.0; self.n];
        for j in 0..k {
            let mut v: Vec<f64> = x.column(j).iter().copied().collect();
            self.project(&mut v);
            let nv = norm(&v);
            v.iter_mut().for_each(|e| *e /= nv);
            self.op.apply(&v, &mut ax)?;
            let theta = dot(&v, &ax);
            let r = ax
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - theta * b) * (a - theta * b))
                .sum::<f64>()
                .sqrt();
            out.values.push(theta);
            out.vectors.push(v);
            out.residuals.push(r);
        }
        Ok(out)
    }
}

fn gram(z: &[Vec<f64>]) -> DMatrix<f64> {
    let p = z.len();
    let mut g = DMatrix::zeros(p, p);
    for a in 0..p {
        for b in a..p {
            let v = dot(&z[a], &z[b]);
            g[(a, b)] = v;
            g[(b, a)] = v;
        }
    }
    g
}

/// Lowest `k` eigenpairs of `op`, restricted to `sector` when given.
pub(crate) fn smallest<A: LinearOperator + ?Sized>(
    op: &A,
    k: usize,
    cfg: KrylovConfig,
    sector: Option<&Sector>,
) -> Result<RitzPairs> {
    let n = op.dim();
    let max_basis = cfg.max_basis.min(n);
    let block = cfg.block.clamp(1, max_basis);
    let keep = cfg.keep.max(k).min(max_basis.saturating_sub(block));
    let mut st = State {
        op,
        sector,
        max_basis,
        n,
        basis: DMatrix::zeros(n, max_basis),
        t: DMatrix::zeros(max_basis, max_basis),
        m: 0,
        last_images: Vec::new(),
        rng: UniformRng::new(cfg.seed),
    };

    let mut start = Vec::with_capacity(block);
    for _ in 0..block {
        let mut v = vec![0.0; n];
        st.rng.fill(&mut v);
        start.push(v);
    }
    st.append(start)?;

    let mut restarts = 0usize;
    let mut strictness = 0.5;
    let mut certify_failures = 0usize;
    let mut steps = 0usize;
    let mut best = f64::INFINITY;
    let mut best_res: Vec<f64> = Vec::new();
    let mut stalled = 0usize;

    loop {
        let z = st.residual_block();
        let exhausted = z.is_empty();
        let full = st.m + block > max_basis;
        steps += 1;

        if full || exhausted || st.m <= 120 || steps.is_multiple_of(8) {
            let (theta, s) = st.ritz();
            if st.m < k {
                if exhausted {
                    return Err(Error::TooManyEigenpairs { k, dim: st.m });
                }
            } else {
                let g = gram(&z);
                let p_last = z.len();
                let res: Vec<f64> = (0..k)
                    .map(|i| {
                        if p_last == 0 {
                            return 0.0;
                        }
                        let tail = s.view((st.m - p_last, i), (p_last, 1));
                        (tail.transpose() * &g * tail)[(0, 0)].max(0.0).sqrt()
                    })
                    .collect();
                let converged = res
                    .iter()
                    .zip(&theta)
                    .all(|(r, t)| *r <= strictness * cfg.tol * t.abs().max(1.0));
                if converged || exhausted {
                    let mut pairs = st.certify(&st.ritz_vectors(&s, k), k)?;
                    let ok = pairs
                        .residuals
                        .iter()
                        .zip(&pairs.values)
                        .all(|(r, t)| *r <= cfg.tol * t.abs().max(1.0));
                    if ok {
                        let mut order: Vec<usize> = (0..k).collect();
                        order.sort_by(|&a, &b| pairs.values[a].total_cmp(&pairs.values[b]));
                        pairs.values = order.iter().map(|&i| pairs.values[i]).collect();
                        pairs.vectors = order.iter().map(|&i| pairs.vectors[i].clone()).collect();
                        pairs.residuals = order.iter().map(|&i| pairs.residuals[i]).collect();
                        pairs.restarts = restarts;
                        return Ok(pairs);
                    }
                    certify_failures += 1;
                    strictness *= 0.1;
                    if exhausted || certify_failures > 6 {
                        return Err(Error::NoConvergence {
                            iterations: restarts,
                            residuals: pairs.residuals,
                        });
                    }
                }
                if full {
                    let worst = res
                        .iter()
                        .zip(&theta)
                        .map(|(r, t)| r / t.abs().max(1.0))
                        .fold(0.0, f64::max);
                    if worst < 0.999 * best {
                        best = worst;
                        best_res = res;
                        stalled = 0;
                    } else {
                        stalled += 1;
                    }
                    if stalled > 200 || restarts >= cfg.max_restarts {
                        return Err(Error::NoConvergence {
                            iterations: restarts,
                            residuals: best_res,
                        });
                    }
                }
            }

            if full {
                let keep = keep.min(st.m);
                let y = st.ritz_vectors(&s, keep);
                st.basis.columns_mut(0, keep).copy_from(&y);
                st.t.fill(0.0);
                for (i, th) in theta.iter().enumerate().take(keep) {
                    st.t[(i, i)] = *th;
                }
                st.m = keep;
                restarts += 1;
            }
        }

        if st.append(z)? == 0 {
            st.last_images.clear();
        }
    }
}
