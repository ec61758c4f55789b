//! Potentials, flea perturbations, classical minima and the flea validity check.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::lattice::{Boundary, Grid};

/// Gaussian wells on a square supercell of `cells x cells` unit cells.
///
/// Each well is `v0 * exp(-(alpha_x dx^2 + alpha_y dy^2) / a^2)`; wells are
/// summed over the minimal periodic images and the total is shifted so that
/// the value at a cell center is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianLattice {
    pub v0: f64,
    pub alpha_x: f64,
    pub alpha_y: f64,
    pub a: f64,
    pub cells: usize,
    pub lattice_const: f64,
}

impl Default for GaussianLattice {
    fn default() -> Self {
        Self {
            v0: -5.0,
            alpha_x: 1.0,
            alpha_y: 1.0,
            a: 1.0,
            cells: 7,
            lattice_const: 3.0,
        }
    }
}

impl GaussianLattice {
    pub fn validate(&self) -> Result<()> {
        if !(self.v0 < 0.0 && self.v0.is_finite()) {
            return Err(invalid(
                "v0",
                format!("well depth must be negative, got {}", self.v0),
            ));
        }
        for (name, v) in [
            ("alpha_x", self.alpha_x),
            ("alpha_y", self.alpha_y),
            ("a", self.a),
            ("lattice_const", self.lattice_const),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be positive, got {v}")));
            }
        }
        if self.cells == 0 {
            return Err(invalid("cells", "must be at least 1"));
        }
        Ok(())
    }

    /// Side length of the supercell.
    pub fn supercell(&self) -> f64 {
        self.cells as f64 * self.lattice_const
    }

    /// Supercell spans `[-L/2, L/2)` on both axes.
    pub fn bounds(&self) -> (f64, f64) {
        let half = 0.5 * self.supercell();
        (-half, half)
    }

    /// Center coordinate of cell `i` along one axis.
    pub fn center_coord(&self, i: usize) -> f64 {
        self.bounds().0 + (i as f64 + 0.5) * self.lattice_const
    }

    /// Cell centers, row-major with the x index slowest.
    pub fn cell_centers(&self) -> Vec<[f64; 2]> {
        let mut out = Vec::with_capacity(self.cells * self.cells);
        for i in 0..self.cells {
            for j in 0..self.cells {
                out.push([self.center_coord(i), self.center_coord(j)]);
            }
        }
        out
    }

    /// Index of the cell containing `(x, y)` (periodically wrapped).
    pub fn cell_of(&self, x: f64, y: f64) -> (usize, usize) {
        let (lo, _) = self.bounds();
        let l = self.supercell();
        let wrap = |u: f64| {
            let t = num_traits::Euclid::rem_euclid(&(u - lo), &l);
            ((t / self.lattice_const) as usize).min(self.cells - 1)
        };
        (wrap(x), wrap(y))
    }

    /// Minimal-image displacement along one axis.
    pub fn periodic_delta(&self, d: f64) -> f64 {
        let l = self.supercell();
        d - l * (d / l).round()
    }

    fn raw(&self, x: f64, y: f64) -> f64 {
        let inv_a2 = 1.0 / (self.a * self.a);
        let mut total = 0.0;
        for i in 0..self.cells {
            let dx = self.periodic_delta(x - self.center_coord(i));
            let ex = self.alpha_x * dx * dx;
            for j in 0..self.cells {
                let dy = self.periodic_delta(y - self.center_coord(j));
                total += self.v0 * (-(ex + self.alpha_y * dy * dy) * inv_a2).exp();
            }
        }
        total
    }

    /// Constant added to the raw well sum.
    pub fn offset(&self) -> f64 {
        -self.raw(self.center_coord(0), self.center_coord(0))
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.raw(x, y) + self.offset()
    }

    /// Periodic grid covering the supercell with `nodes_per_cell` nodes per cell and axis.
    pub fn grid(&self, nodes_per_cell: usize) -> Result<crate::lattice::Grid2D> {
        let (lo, hi) = self.bounds();
        crate::lattice::Grid2D::square(lo, hi, self.cells * nodes_per_cell, Boundary::Periodic)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialSpec {
    /// `(x^2 - 1)^2` in one dimension.
    DoubleWell,
    /// `(|q|^2 - 1)^2` in two dimensions.
    MexicanHat,
    /// `omega^2 x^2 / 2` in one dimension.
    Harmonic {
        omega: f64,
    },
    GaussianLattice(GaussianLattice),
}

impl PotentialSpec {
    pub fn dim(&self) -> usize {
        match self {
            PotentialSpec::DoubleWell | PotentialSpec::Harmonic { .. } => 1,
            PotentialSpec::MexicanHat | PotentialSpec::GaussianLattice(_) => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PotentialSpec::Harmonic { omega } if !(*omega > 0.0 && omega.is_finite()) => {
                Err(invalid("omega", format!("must be positive, got {omega}")))
            }
            PotentialSpec::GaussianLattice(g) => g.validate(),
            _ => Ok(()),
        }
    }
}

/// Potential value at `point`; the slice length must equal the variant dimension.
pub fn eval_potential(spec: &PotentialSpec, point: &[f64]) -> Result<f64> {
    if point.len() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: point.len(),
        });
    }
    Ok(match spec {
        PotentialSpec::DoubleWell => {
            let u = point[0] * point[0] - 1.0;
            u * u
        }
        PotentialSpec::MexicanHat => {
            let u = point[0] * point[0] + point[1] * point[1] - 1.0;
            u * u
        }
        PotentialSpec::Harmonic { omega } => 0.5 * omega * omega * point[0] * point[0],
        PotentialSpec::GaussianLattice(g) => g.eval(point[0], point[1]),
    })
}

/// Smooth compactly supported bump `exp(1/c^2 - 1/(c^2 - u^2))` for `|u| < c`.
#[inline]
pub fn bump_profile(u: f64, c: f64) -> f64 {
    let c2 = c * c;
    let u2 = u * u;
    if u2 >= c2 {
        0.0
    } else {
        (1.0 / c2 - 1.0 / (c2 - u2)).exp()
    }
}

/// One-dimensional flea `d * bump(x - b)` with half-width `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump1D {
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Default for Bump1D {
    fn default() -> Self {
        Self {
            b: 0.65,
            c: 0.2,
            d: -0.1,
        }
    }
}

impl Bump1D {
    pub fn eval(&self, x: f64) -> f64 {
        self.d * bump_profile(x - self.b, self.c)
    }
}

/// Free-function form of [`Bump1D::eval`].
pub fn eval_flea(flea: &Bump1D, x: f64) -> f64 {
    flea.eval(x)
}

#[derive(Debug, Clone, PartialEq)]
pub enum FleaSpec {
    Bump1D(Bump1D),
    /// Height `delta` on each listed node of a 2D grid.
    GridPoints2D {
        points: Vec<usize>,
        delta: f64,
    },
    /// Disk-supported bump `d * bump(|q - center|)` in two dimensions.
    RadialBump2D {
        center: [f64; 2],
        c: f64,
        d: f64,
    },
}

impl FleaSpec {
    pub fn dim(&self) -> usize {
        match self {
            FleaSpec::Bump1D(_) => 1,
            _ => 2,
        }
    }

    fn check_shape(&self) -> Result<()> {
        match self {
            FleaSpec::Bump1D(f) => {
                if !(f.c > 0.0 && f.c.is_finite()) {
                    return Err(Error::InvalidFlea(format!(
                        "half-width c must be positive, got {}",
                        f.c
                    )));
                }
                if !(f.b.is_finite() && f.d.is_finite()) {
                    return Err(Error::InvalidFlea("b and d must be finite".into()));
                }
            }
            FleaSpec::GridPoints2D { points, delta } => {
                if points.is_empty() {
                    return Err(Error::InvalidFlea(
                        "grid-point flea needs at least one node".into(),
                    ));
                }
                if !delta.is_finite() {
                    return Err(Error::InvalidFlea("delta must be finite".into()));
                }
            }
            FleaSpec::RadialBump2D { center, c, d } => {
                if !(*c > 0.0 && c.is_finite()) {
                    return Err(Error::InvalidFlea(format!(
                        "half-width c must be positive, got {c}"
                    )));
                }
                if !(center.iter().all(|v| v.is_finite()) && d.is_finite()) {
                    return Err(Error::InvalidFlea("center and d must be finite".into()));
                }
            }
        }
        Ok(())
    }

    /// Flea value at node `idx` of `grid`.
    pub fn value_at(&self, grid: &Grid, idx: usize) -> Result<f64> {
        if grid.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: grid.dim(),
            });
        }
        let p = grid.point(idx);
        Ok(match self {
            FleaSpec::Bump1D(f) => f.eval(p[0]),
            FleaSpec::GridPoints2D { points, delta } => {
                points.iter().filter(|&&k| k == idx).count() as f64 * delta
            }
            FleaSpec::RadialBump2D { center, c, d } => {
                let r = (p[0] - center[0]).hypot(p[1] - center[1]);
                d * bump_profile(r, *c)
            }
        })
    }
}

/// Phase-space point `(q, p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhasePoint {
    pub fn at_rest(q: Vec<f64>) -> Self {
        let p = vec![0.0; q.len()];
        Self { q, p }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClassicalMinima {
    FinitePoints(Vec<PhasePoint>),
    /// `{ p = 0, |q| = radius }`.
    Circle {
        radius: f64,
    },
}

/// Minimum set of `h0(q, p) = |p|^2 + V(q)`.
pub fn classical_minima(spec: &PotentialSpec) -> ClassicalMinima {
    match spec {
        PotentialSpec::DoubleWell => ClassicalMinima::FinitePoints(vec![
            PhasePoint::at_rest(vec![-1.0]),
            PhasePoint::at_rest(vec![1.0]),
        ]),
        PotentialSpec::MexicanHat => ClassicalMinima::Circle { radius: 1.0 },
        PotentialSpec::Harmonic { .. } => {
            ClassicalMinima::FinitePoints(vec![PhasePoint::at_rest(vec![0.0])])
        }
        PotentialSpec::GaussianLattice(g) => ClassicalMinima::FinitePoints(
            g.cell_centers()
                .into_iter()
                .map(|c| PhasePoint::at_rest(c.to_vec()))
                .collect(),
        ),
    }
}

/// Classical Hamiltonian `|p|^2 + V(q)`.
pub fn classical_hamiltonian(spec: &PotentialSpec, q: &[f64], p: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: q.len(),
            got: p.len(),
        });
    }
    Ok(p.iter().map(|v| v * v).sum::<f64>() + eval_potential(spec, q)?)
}

/// Outcome of [`validate_flea`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport {
    /// Condition (i): the support avoids an `epsilon` neighbourhood of every minimum.
    pub disjoint_from_minima: bool,
    /// Condition (ii): the support is at positive distance from, and not farther
    /// than the minimal inter-minima distance to, the nearest minimum.
    pub within_reach: bool,
    pub support_distance: f64,
    pub inter_minima_distance: f64,
    pub epsilon: f64,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.disjoint_from_minima && self.within_reach
    }

    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        if !self.disjoint_from_minima {
            parts.push(format!(
                "condition (i) violated: support reaches within {:.6e} of a classical minimum (required > {:.6e})",
                self.support_distance, self.epsilon
            ));
        }
        if !self.within_reach {
            parts.push(format!(
                "condition (ii) violated: distance to the nearest minimum {:.6e} must be positive and at most the inter-minima distance {:.6e}",
                self.support_distance, self.inter_minima_distance
            ));
        }
        if parts.is_empty() {
            String::from("valid")
        } else {
            parts.join("; ")
        }
    }
}

fn min_pairwise(points: &[Vec<f64>], dist: &dyn Fn(&[f64], &[f64]) -> f64) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            best = best.min(dist(&points[i], &points[j]));
        }
    }
    best
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Checks the two localization conditions a flea must meet on `grid`.
pub fn validate_flea(spec: &PotentialSpec, flea: &FleaSpec, grid: &Grid) -> Result<ValidityReport> {
    flea.check_shape()?;
    if flea.dim() != spec.dim() || grid.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: if flea.dim() != spec.dim() {
                flea.dim()
            } else {
                grid.dim()
            },
        });
    }
    let epsilon = 1e-6 + grid.max_spacing();
    let minima = classical_minima(spec);

    let (support_distance, inter, eps) = match (&minima, flea) {
        (ClassicalMinima::FinitePoints(pts), FleaSpec::Bump1D(f)) => {
            let qs: Vec<Vec<f64>> = pts.iter().map(|p| p.q.clone()).collect();
            let d = qs
                .iter()
                .map(|m| ((m[0] - f.b).abs() - f.c).max(0.0))
                .fold(f64::INFINITY, f64::min);
            (d, min_pairwise(&qs, &euclid), epsilon)
        }
        (ClassicalMinima::FinitePoints(pts), FleaSpec::RadialBump2D { center, c, .. }) => {
            let qs: Vec<Vec<f64>> = pts.iter().map(|p| p.q.clone()).collect();
            let d = qs
                .iter()
                .map(|m| (euclid(m, center) - c).max(0.0))
                .fold(f64::INFINITY, f64::min);
            (d, min_pairwise(&qs, &euclid), epsilon)
        }
        (ClassicalMinima::FinitePoints(pts), FleaSpec::GridPoints2D { points, .. }) => {
            let periodic = match spec {
                PotentialSpec::GaussianLattice(g) if grid.boundary() == Boundary::Periodic => {
                    Some(*g)
                }
                _ => None,
            };
            let dist = move |a: &[f64], b: &[f64]| match periodic {
                Some(g) => g
                    .periodic_delta(a[0] - b[0])
                    .hypot(g.periodic_delta(a[1] - b[1])),
                None => euclid(a, b),
            };
            let qs: Vec<Vec<f64>> = pts.iter().map(|p| p.q.clone()).collect();
            let mut d = f64::INFINITY;
            for &idx in points {
                if idx >= grid.len() {
                    return Err(Error::InvalidFlea(format!(
                        "flea node {idx} outside the grid of {} nodes",
                        grid.len()
                    )));
                }
                let x = grid.point(idx);
                for m in &qs {
                    d = d.min(dist(&x, m));
                }
            }
            // Point fleas must keep three grid spacings from every minimum.
            (d, min_pairwise(&qs, &dist), 3.0 * grid.max_spacing() - 1e-9)
        }
        (ClassicalMinima::Circle { radius }, FleaSpec::RadialBump2D { center, c, .. }) => {
            let r = center[0].hypot(center[1]);
            (((r - radius).abs() - c).max(0.0), 2.0 * radius, epsilon)
        }
        (ClassicalMinima::Circle { radius }, FleaSpec::GridPoints2D { points, .. }) => {
            let mut d = f64::INFINITY;
            for &idx in points {
                if idx >= grid.len() {
                    return Err(Error::InvalidFlea(format!(
                        "flea node {idx} outside the grid of {} nodes",
                        grid.len()
                    )));
                }
                let x = grid.point(idx);
                d = d.min((x[0].hypot(x[1]) - radius).abs());
            }
            (d, 2.0 * radius, 3.0 * grid.max_spacing() - 1e-9)
        }
        (ClassicalMinima::Circle { .. }, FleaSpec::Bump1D(_)) => {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: 1,
            })
        }
    };

    let disjoint = support_distance > eps;
    let within = support_distance > 0.0 && support_distance <= inter;
    Ok(ValidityReport {
        disjoint_from_minima: disjoint,
        within_reach: within,
        support_distance,
        inter_minima_distance: inter,
        epsilon: eps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Grid1D, Grid2D};

    fn dw_grid() -> Grid {
        Grid1D::new(-2.0, 2.0, 401, Boundary::Dirichlet)
            .unwrap()
            .into()
    }

    #[test]
    fn basic_values() {
        assert_eq!(
            eval_potential(&PotentialSpec::DoubleWell, &[1.0]).unwrap(),
            0.0
        );
        assert_eq!(
            eval_potential(&PotentialSpec::DoubleWell, &[-1.0]).unwrap(),
            0.0
        );
        let h = PotentialSpec::Harmonic { omega: 1.0 };
        assert_eq!(eval_potential(&h, &[2.0]).unwrap(), 2.0);
        assert!(eval_potential(&h, &[2.0, 1.0]).is_err());
    }

    #[test]
    fn gaussian_lattice_zero_at_centers() {
        let g = GaussianLattice::default();
        let spec = PotentialSpec::GaussianLattice(g);
        for c in g.cell_centers() {
            assert!(eval_potential(&spec, &c).unwrap().abs() < 1e-12);
        }
        assert!(eval_potential(&spec, &[1.5, 1.5]).unwrap() > 4.0);
    }

    #[test]
    fn flea_reference_value() {
        let f = Bump1D::default();
        assert_eq!(f.eval(0.65), -0.1);
        assert_eq!(f.eval(0.85), 0.0);
        assert_eq!(f.eval(0.45), 0.0);
        let expected = -0.1 * (25.0f64 - 1.0 / 0.03).exp();
        assert!((f.eval(0.75) - expected).abs() < 1e-15);
        assert!((f.eval(0.75) + 2.40e-5).abs() < 5e-8);
    }

    #[test]
    fn flea_validation_examples() {
        let g = dw_grid();
        let dw = PotentialSpec::DoubleWell;
        let ok = validate_flea(&dw, &FleaSpec::Bump1D(Bump1D::default()), &g).unwrap();
        assert!(ok.is_valid());
        assert!((ok.support_distance - 0.15).abs() < 1e-12);
        assert_eq!(ok.inter_minima_distance, 2.0);

        let overlap = FleaSpec::Bump1D(Bump1D {
            b: 1.0,
            ..Bump1D::default()
        });
        let r = validate_flea(&dw, &overlap, &g).unwrap();
        assert!(!r.disjoint_from_minima);
        assert!(!r.is_valid());

        let far = FleaSpec::Bump1D(Bump1D {
            b: 3.5,
            ..Bump1D::default()
        });
        let r = validate_flea(&dw, &far, &g).unwrap();
        assert!(r.disjoint_from_minima);
        assert!(!r.within_reach);
        assert!((r.support_distance - 2.3).abs() < 1e-12);
    }

    #[test]
    fn circle_rejects_bump1d() {
        let g: Grid = Grid2D::square(-2.0, 2.0, 21, Boundary::Dirichlet)
            .unwrap()
            .into();
        let r = validate_flea(
            &PotentialSpec::MexicanHat,
            &FleaSpec::Bump1D(Bump1D::default()),
            &g,
        );
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn radial_bump_inside_annulus_is_valid() {
        let g: Grid = Grid2D::square(-2.0, 2.0, 161, Boundary::Dirichlet)
            .unwrap()
            .into();
        let f = FleaSpec::RadialBump2D {
            center: [0.65, 0.0],
            c: 0.2,
            d: -0.1,
        };
        let r = validate_flea(&PotentialSpec::MexicanHat, &f, &g).unwrap();
        assert!(r.is_valid(), "{}", r.describe());
    }

    #[test]
    fn grid_point_fleas_keep_distance_from_centers() {
        let lat = GaussianLattice {
            cells: 3,
            ..GaussianLattice::default()
        };
        let g2 = lat.grid(20).unwrap();
        let spec = PotentialSpec::GaussianLattice(lat);
        let g: Grid = g2.clone().into();
        let at_center = g2.index(30, 30);
        let near = g2.index(33, 30);
        let r = validate_flea(
            &spec,
            &FleaSpec::GridPoints2D {
                points: vec![at_center],
                delta: 0.1,
            },
            &g,
        )
        .unwrap();
        assert!(!r.is_valid());
        let r = validate_flea(
            &spec,
            &FleaSpec::GridPoints2D {
                points: vec![near],
                delta: 0.1,
            },
            &g,
        )
        .unwrap();
        assert!(r.is_valid(), "{}", r.describe());
    }
}
