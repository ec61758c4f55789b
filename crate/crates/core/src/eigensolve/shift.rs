//! Shift-invert: Lanczos on `-(H - sigma)^{-1}`, applied by conjugate gradients.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::krylov::{self, dot, norm, RitzPairs};
use super::{LinearOperator, SolverOptions};
use crate::error::{Error, Result};
use crate::lattice::SparseSymmetricOperator;

struct ShiftInverted<'a> {
    op: &'a SparseSymmetricOperator,
    sigma: f64,
    rel_tol: f64,
    max_iter: usize,
}

impl ShiftInverted<'_> {
    fn shifted_apply(&self, x: &[f64], y: &mut [f64]) {
        self.op.apply(x, y);
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi -= self.sigma * xi;
        }
    }
}

impl LinearOperator for ShiftInverted<'_> {
    fn dim(&self) -> usize {
        self.op.dim()
    }

    /// `y = -(H - sigma)^{-1} x`.
    fn apply(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        let n = x.len();
        let bnorm = norm(x);
        y.iter_mut().for_each(|v| *v = 0.0);
        if bnorm == 0.0 {
            return Ok(());
        }
        let mut sol = vec![0.0; n];
        let mut r = x.to_vec();
        let mut p = r.clone();
        let mut ap = vec![0.0; n];
        let mut rr = dot(&r, &r);
        let target = self.rel_tol * bnorm;
        for _ in 0..self.max_iter {
            self.shifted_apply(&p, &mut ap);
            let curv = dot(&p, &ap);
            if curv <= 0.0 {
                return Err(Error::ShiftTooHigh(self.sigma));
            }
            let alpha = rr / curv;
            for i in 0..n {
                sol[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            let rr_new = dot(&r, &r);
            if rr_new.sqrt() <= target {
                for (yi, si) in y.iter_mut().zip(&sol) {
                    *yi = -si;
                }
                return Ok(());
            }
            let beta = rr_new / rr;
            rr = rr_new;
            for i in 0..n {
                p[i] = r[i] + beta * p[i];
            }
        }
        Err(Error::InnerSolve(self.max_iter))
    }
}

/// Shift a little below the lowest eigenvalues found by a loose solve.
pub(super) fn auto_shift(
    op: &SparseSymmetricOperator,
    k: usize,
    opts: &SolverOptions,
) -> Result<f64> {
    let n = op.dim();
    let kk = (k + 1).min(n - 1);
    let loose = SolverOptions {
        tol: 1e-4,
        ..opts.clone()
    };
    let pre = krylov::smallest(op, kk, loose.krylov_config(kk, n), opts.sector.as_ref())?;
    let lo = pre.values[0];
    let spread = (pre.values[kk - 1] - lo).max(1e-8 * lo.abs().max(1.0));
    Ok(lo - 2.0 * pre.residuals[0] - 0.05 * spread)
}

/// Lowest `k` pairs of `op` through the spectral transformation around `sigma`.
pub(super) fn smallest_shifted(
    op: &SparseSymmetricOperator,
    k: usize,
    sigma: f64,
    opts: &SolverOptions,
) -> Result<RitzPairs> {
    let n = op.dim();
    let scale = op.norm_bound().max(1.0);
    let mut outer_tol = (opts.tol / scale).max(1e-13);
    let mut last = Vec::new();
    for _ in 0..4 {
        let inv = ShiftInverted {
            op,
            sigma,
            rel_tol: (0.1 * outer_tol).max(1e-15),
            max_iter: 20 * n + 1000,
        };
        let cfg = SolverOptions {
            tol: outer_tol,
            ..opts.clone()
        }
        .krylov_config(k, n);
        let pairs = krylov::smallest(&inv, k, cfg, opts.sector.as_ref())?;

        let mut values = Vec::with_capacity(k);
        let mut residuals = Vec::with_capacity(k);
        let mut hv = vec![0.0; n];
        for v in &pairs.vectors {
            op.apply(v, &mut hv);
            let theta = dot(v, &hv);
            let r = hv
                .iter()
                .zip(v)
                .map(|(a, b)| (a - theta * b) * (a - theta * b))
                .sum::<f64>()
                .sqrt();
            values.push(theta);
            residuals.push(r);
        }
        let ok = residuals
            .iter()
            .zip(&values)
            .all(|(r, t)| *r <= opts.tol * t.abs().max(1.0));
        if ok {
            let mut order: Vec<usize> = (0..k).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            return Ok(RitzPairs {
                values: order.iter().map(|&i| values[i]).collect(),
                vectors: order.iter().map(|&i| pairs.vectors[i].clone()).collect(),
                residuals: order.iter().map(|&i| residuals[i]).collect(),
                restarts: pairs.restarts,
            });
        }
        let worst = residuals
            .iter()
            .zip(&values)
            .map(|(r, t)| r / (opts.tol * t.abs().max(1.0)))
            .fold(0.0, f64::max);
        outer_tol = (outer_tol / (worst * 10.0)).max(1e-14);
        last = residuals;
    }
    Err(Error::NoConvergence {
        iterations: 4,
        residuals: last,
    })
}
