use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::coherent::{check_hbar, check_resolution};
use super::husimi::{kernel_axes, window, PhaseGrid};
use crate::error::{Error, Result};
use crate::lattice::Grid;

/// Largest grid a dense quantization is built on.
pub const DENSE_LIMIT: usize = 1000;

/// Berezin quantization of a real phase-space symbol sampled on `phase`.
///
/// Returns the Hermitian matrix `Q` with
/// `Q_ij = h * sum_{q,p} f(q,p) w Psi^{(q,p)}(x_i) conj(Psi^{(q,p)}(x_j))`,
/// acting on grid functions so that `<psi, Q psi> = h * sum_ij conj(psi_i) Q_ij psi_j`.
/// The coherent states use the same truncated Gaussian windows as the Husimi
/// transform, which makes `<psi, Q psi>` equal `sum f B_psi w` term by term.
/// Only one-dimensional grids are supported.
pub fn berezin_quantize(
    f: &[f64],
    hbar: f64,
    phase: &PhaseGrid,
    grid: &Grid,
) -> Result<DMatrix<Complex64>> {
    check_hbar(hbar)?;
    if grid.dim() != 1 || phase.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: grid.dim().max(phase.dim()),
        });
    }
    let n = grid.len();
    if n > DENSE_LIMIT {
        return Err(Error::TooLarge {
            dim: n,
            limit: DENSE_LIMIT,
        });
    }
    if f.len() != phase.len() {
        return Err(Error::DimensionMismatch {
            expected: phase.len(),
            got: f.len(),
        });
    }
    if let Some((i, v)) = f.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite {
            index: i,
            value: *v,
        });
    }
    check_resolution(grid, hbar)?;

    let ax = kernel_axes(grid)[0];
    let qa = phase.q_axis(0);
    let pa = phase.p_axis(0);
    let w = phase.weight(hbar);
    let pref = ax.h / (core::f64::consts::PI * hbar).sqrt();
    let p_nodes: Vec<f64> = (0..pa.n)
        .map(|i| pa.min + i as f64 * (pa.max - pa.min) / (pa.n - 1) as f64)
        .collect();

    let mut acc = DMatrix::<Complex64>::zeros(n, n);
    let mut shift = Vec::new();
    for iq in 0..qa.n {
        let q = qa.min + iq as f64 * (qa.max - qa.min) / (qa.n - 1) as f64;
        let (lo, hi) = window(&ax, q, hbar);
        if lo >= hi {
            continue;
        }
        let len = hi - lo;
        // Toeplitz part: F(d) = sum_p f(q,p) w exp(i p d h / hbar), d = i - j.
        shift.clear();
        shift.resize(2 * len - 1, Complex64::new(0.0, 0.0));
        for (ip, &p) in p_nodes.iter().enumerate() {
            let fv = f[iq * pa.n + ip];
            if fv == 0.0 {
                continue;
            }
            for (k, s) in shift.iter_mut().enumerate() {
                let d = k as f64 - (len - 1) as f64;
                *s += Complex64::from_polar(fv * w, p * d * ax.h / hbar);
            }
        }
        let g: Vec<f64> = (lo..hi)
            .map(|j| {
                let x = ax.x0 + j as f64 * ax.h;
                (-(x - q) * (x - q) / (2.0 * hbar)).exp()
            })
            .collect();
        for a in 0..len {
            for b in a..len {
                let v = shift[a + len - 1 - b] * (pref * g[a] * g[b]);
                acc[(lo + a, lo + b)] += v;
            }
        }
    }
    for i in 0..n {
        acc[(i, i)].im = 0.0;
        for j in (i + 1)..n {
            acc[(j, i)] = acc[(i, j)].conj();
        }
    }
    Ok(acc)
}

/// Rejects symbols with a non-zero imaginary part, then quantizes the real part.
pub fn berezin_quantize_complex(
    f: &[Complex64],
    hbar: f64,
    phase: &PhaseGrid,
    grid: &Grid,
) -> Result<DMatrix<Complex64>> {
    if let Some(i) = f.iter().position(|z| z.im != 0.0) {
        return Err(Error::ComplexSymbol(i));
    }
    let re: Vec<f64> = f.iter().map(|z| z.re).collect();
    berezin_quantize(&re, hbar, phase, grid)
}

/// `<psi, Q psi>` under the grid quadrature weight.
pub fn expectation(q: &DMatrix<Complex64>, psi: &[Complex64], weight: f64) -> Complex64 {
    let n = psi.len();
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let mut row = Complex64::new(0.0, 0.0);
        for j in 0..n {
            row += q[(i, j)] * psi[j];
        }
        total += psi[i].conj() * row;
    }
    total * weight
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(q: &DMatrix<Complex64>) -> Vec<f64> {
    let mut ev: Vec<f64> = q.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}
