use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Orthonormality tolerance of the inputs.
pub const ORTHONORMAL_TOL: f64 = 1e-8;

fn wdot(a: &[f64], b: &[f64], weight: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * weight
}

/// Symmetry-breaking combinations `(psi0 ± psi1) / sqrt(2)`.
///
/// Inputs must be orthonormal under the quadrature `weight`.
pub fn anderson_pair(psi0: &[f64], psi1: &[f64], weight: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if psi0.len() != psi1.len() {
        return Err(Error::DimensionMismatch {
            expected: psi0.len(),
            got: psi1.len(),
        });
    }
    let defect = (wdot(psi0, psi0, weight) - 1.0)
        .abs()
        .max((wdot(psi1, psi1, weight) - 1.0).abs())
        .max(wdot(psi0, psi1, weight).abs());
    if defect.is_nan() || defect > ORTHONORMAL_TOL {
        return Err(Error::NotOrthonormal(defect));
    }
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let plus = psi0.iter().zip(psi1).map(|(a, b)| s * (a + b)).collect();
    let minus = psi0.iter().zip(psi1).map(|(a, b)| s * (a - b)).collect();
    Ok((plus, minus))
}
