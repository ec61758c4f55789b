//! Coherent states, Husimi densities, Berezin quantization and the
//! localization diagnostics built on them.

mod anderson;
mod berezin;
mod coherent;
mod husimi;
mod limit;
mod localization;
mod mexican;

pub use anderson::{anderson_pair, ORTHONORMAL_TOL};
pub use berezin::{
    berezin_quantize, berezin_quantize_complex, expectation, hermitian_eigenvalues, DENSE_LIMIT,
};
pub use coherent::{coherent_state, coherent_value, CoherentState, MIN_NODES_PER_WIDTH};
pub use husimi::{
    half_space_mass, husimi, husimi_complex, HusimiField, PhaseGrid, LOW_MASS, WINDOW_WIDTHS,
};
pub use limit::{
    classical_limit_trace, classical_limit_trace_complex, default_suite, DiscreteMeasure, LimitRow,
    LimitTrace, TestFunction, DEFAULT_BUMP_SIGMA,
};
pub use localization::{lattice_cell_masses, position_half_space_mass};
pub use mexican::{
    mexican_hat_radial, mexican_tower, radial_ground_state, radial_operator, RadialGrid,
    RadialState, TowerState,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Boundary, Grid, Grid1D};
    use crate::Error;
    use alloc::vec;
    use alloc::vec::Vec;
    use approx::assert_relative_eq;
    use num_complex::Complex64;
    use num_traits::Float;

    fn line(n: usize) -> Grid {
        Grid::One(Grid1D::new(-4.0, 4.0, n, Boundary::Dirichlet).unwrap())
    }

    #[test]
    fn coherent_state_moments() {
        let g = line(801);
        let cs = coherent_state(&[0.7], &[-0.4], 0.1, &g).unwrap();
        assert!(cs.norm_defect.abs() < 1e-10);
        let w = g.weight();
        let mean_x: f64 = (0..g.len())
            .map(|i| g.point(i)[0] * cs.samples[i].norm_sqr())
            .sum::<f64>()
            * w;
        assert_relative_eq!(mean_x, 0.7, epsilon = 1e-10);
        let var: f64 = (0..g.len())
            .map(|i| (g.point(i)[0] - 0.7).powi(2) * cs.samples[i].norm_sqr())
            .sum::<f64>()
            * w;
        assert_relative_eq!(var, 0.05, epsilon = 1e-8);
    }

    #[test]
    fn coherent_overlap_law() {
        let g = line(1601);
        let hbar = 0.1;
        let a = coherent_state(&[0.2], &[0.1], hbar, &g).unwrap();
        let b = coherent_state(&[0.5], &[-0.3], hbar, &g).unwrap();
        let ov = a.overlap(&b.samples, g.weight()).norm_sqr();
        let d2 = 0.3f64.powi(2) + 0.4f64.powi(2);
        assert_relative_eq!(ov, (-d2 / (2.0 * hbar)).exp(), epsilon = 1e-9);
    }

    #[test]
    fn under_resolved_grid_is_rejected() {
        let g = line(51);
        assert!(matches!(
            coherent_state(&[0.0], &[0.0], 0.01, &g),
            Err(Error::UnderResolved { .. })
        ));
    }

    #[test]
    fn husimi_of_coherent_state_peaks_at_its_center() {
        let g = line(801);
        let hbar = 0.1;
        let cs = coherent_state(&[0.5], &[0.3], hbar, &g).unwrap();
        let phase = PhaseGrid::square_1d(-2.0, 2.0, 161).unwrap();
        let field = husimi_complex(&cs.samples, &g, hbar, &phase).unwrap();
        assert!((field.mass - 1.0).abs() < 1e-6);
        assert!(!field.low_mass_warning);
        let (q, p) = field.argmax();
        assert_relative_eq!(q[0], 0.5, epsilon = 0.03);
        assert_relative_eq!(p[0], 0.3, epsilon = 0.03);
        let right = half_space_mass(&field, 0, 0.0).unwrap();
        assert!(right > 0.9);
    }

    #[test]
    fn husimi_rejects_unnormalized_input() {
        let g = line(801);
        let psi = vec![1.0; g.len()];
        assert!(husimi(&psi, &g, 0.1, &PhaseGrid::default_1d()).is_err());
    }

    #[test]
    fn berezin_duality_on_a_small_grid() {
        let g = line(301);
        let hbar = 0.2;
        let phase = PhaseGrid::square_1d(-3.0, 3.0, 61).unwrap();
        let f = phase.sample(|q, p| (q[0] * 0.7).sin() + p[0] * p[0]);
        let q = berezin_quantize(&f, hbar, &phase, &g).unwrap();
        let cs = coherent_state(&[0.3], &[0.2], hbar, &g).unwrap();
        let lhs = expectation(&q, &cs.samples, g.weight());
        let rhs = husimi_complex(&cs.samples, &g, hbar, &phase)
            .unwrap()
            .integrate(&f);
        assert!(lhs.im.abs() < 1e-12);
        assert_relative_eq!(lhs.re, rhs, epsilon = 1e-10);
        let ev = hermitian_eigenvalues(&q);
        assert!(ev.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn berezin_rejects_complex_symbols() {
        let g = line(301);
        let phase = PhaseGrid::square_1d(-1.0, 1.0, 5).unwrap();
        let mut f = vec![Complex64::new(1.0, 0.0); phase.len()];
        f[3].im = 0.5;
        assert!(matches!(
            berezin_quantize_complex(&f, 0.2, &phase, &g),
            Err(Error::ComplexSymbol(3))
        ));
    }

    #[test]
    fn anderson_pair_of_sine_modes() {
        let n = 200;
        let h = 1.0 / n as f64;
        let mode = |k: f64| -> Vec<f64> {
            (0..n)
                .map(|i| (2.0f64).sqrt() * (k * core::f64::consts::PI * (i as f64 + 0.5) * h).sin())
                .collect()
        };
        let (p, m) = anderson_pair(&mode(1.0), &mode(2.0), h).unwrap();
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>() * h;
        assert_relative_eq!(norm(&p), 1.0, epsilon = 1e-10);
        assert_relative_eq!(norm(&m), 1.0, epsilon = 1e-10);
        assert!(matches!(
            anderson_pair(&mode(1.0), &mode(1.0), h),
            Err(Error::NotOrthonormal(_))
        ));
    }

    #[test]
    fn radial_sector_energies_increase_with_angular_momentum() {
        let grid = RadialGrid::new(400, 2.0).unwrap();
        let e: Vec<f64> = (0..4)
            .map(|n| radial_ground_state(n, 0.1, &grid).unwrap().energy)
            .collect();
        assert!(e.windows(2).all(|w| w[0] < w[1]));
        let s = radial_ground_state(2, 0.1, &grid).unwrap();
        let norm: f64 = s.g.iter().map(|x| x * x).sum::<f64>() * grid.spacing();
        assert_relative_eq!(norm, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn radial_operator_matches_free_disk_limit() {
        // Free particle in the unit disk, n = 0: lowest eigenvalue hbar^2 j_{0,1}^2.
        let grid = RadialGrid::new(800, 1.0).unwrap();
        let op = radial_operator(0, 1.0, &grid, |_| 0.0).unwrap();
        let tol = 1e-10f64.max(64.0 * f64::EPSILON * op.norm_bound());
        let s = crate::eigensolve::lowest_k(&op, 1, tol).unwrap();
        let j01 = 2.404_825_557_695_773f64;
        assert_relative_eq!(s.eigenvalues[0], j01 * j01, max_relative = 1e-4);
    }

    #[test]
    fn tower_density_is_normalized_and_peaks_at_theta() {
        let grid = RadialGrid::new(300, 2.0).unwrap();
        let states: Vec<RadialState> = (0..=3)
            .map(|n| radial_ground_state(n, 0.1, &grid).unwrap())
            .collect();
        let tower = mexican_tower(&states, 3, 0.0).unwrap();
        let bins = 720;
        let prof = tower.angular_profile(bins);
        let total: f64 = prof.iter().sum::<f64>() * 2.0 * core::f64::consts::PI / bins as f64;
        assert_relative_eq!(total, 1.0, epsilon = 1e-10);
        let peak = (0..bins)
            .max_by(|&a, &b| prof[a].total_cmp(&prof[b]))
            .unwrap();
        assert!(peak == 0 || peak == bins - 1);
        assert!(matches!(
            mexican_tower(&states, 4, 0.0),
            Err(Error::MissingSector(4))
        ));
    }

    #[test]
    fn rephased_tower_has_the_same_density() {
        let grid = RadialGrid::new(200, 2.0).unwrap();
        let states: Vec<RadialState> = (0..=1)
            .map(|n| radial_ground_state(n, 0.2, &grid).unwrap())
            .collect();
        let t = mexican_tower(&states, 1, 1.0).unwrap();
        let r = t.rephased(0.8);
        assert_relative_eq!(
            t.value(0.3, 0.9).norm(),
            r.value(0.3, 0.9).norm(),
            epsilon = 1e-14
        );
        assert_relative_eq!(
            t.angular_density(0.4),
            r.angular_density(0.4),
            epsilon = 1e-14
        );
    }
}
