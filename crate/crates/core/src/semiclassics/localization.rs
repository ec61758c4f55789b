use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::lattice::{Grid, Grid2D};
use crate::potentials::GaussianLattice;

/// Fraction of `|psi|^2` on nodes whose coordinate `axis` exceeds `threshold`;
/// nodes on the threshold count half.
pub fn position_half_space_mass(
    psi: &[f64],
    grid: &Grid,
    axis: usize,
    threshold: f64,
) -> Result<f64> {
    if psi.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            got: psi.len(),
        });
    }
    if axis >= grid.dim() {
        return Err(invalid(
            "axis",
            format!("axis {axis} out of range for a {}D grid", grid.dim()),
        ));
    }
    let mut total = 0.0;
    let mut above = 0.0;
    for (i, v) in psi.iter().enumerate() {
        let d = v * v;
        total += d;
        let c = grid.point(i)[axis];
        if c > threshold {
            above += d;
        } else if c == threshold {
            above += 0.5 * d;
        }
    }
    if total <= 0.0 {
        return Err(Error::ZeroMass);
    }
    Ok(above / total)
}

/// Probability mass of `psi` in each unit cell of `lattice`, row-major with the
/// x cell index slowest. A node on a cell boundary belongs to the cell above it.
pub fn lattice_cell_masses(
    psi: &[f64],
    grid: &Grid2D,
    lattice: &GaussianLattice,
) -> Result<Vec<f64>> {
    if psi.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            got: psi.len(),
        });
    }
    let nc = lattice.cells;
    let mut masses = vec![0.0; nc * nc];
    let mut total = 0.0;
    for (i, v) in psi.iter().enumerate() {
        let d = v * v;
        total += d;
        let [x, y] = grid.node(i);
        let (cx, cy) = lattice.cell_of(x, y);
        masses[cx * nc + cy] += d;
    }
    if total <= 0.0 {
        return Err(Error::ZeroMass);
    }
    masses.iter_mut().for_each(|m| *m /= total);
    Ok(masses)
}
