use proptest::prelude::*;

use ssb_core::eigensolve::lowest_k;
use ssb_core::lattice::{assemble_hamiltonian, build_laplacian, Boundary, Grid, Grid1D, Grid2D};
use ssb_core::potentials::{Bump1D, FleaSpec, PotentialSpec};

fn grid1(lo: f64, hi: f64, n: usize, bc: Boundary) -> Grid {
    Grid1D::new(lo, hi, n, bc).unwrap().into()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn assembled_operators_are_exactly_symmetric(
        n in 5usize..60,
        hbar in 0.01f64..1.0,
        periodic in any::<bool>(),
        with_flea in any::<bool>(),
    ) {
        let bc = if periodic { Boundary::Periodic } else { Boundary::Dirichlet };
        let g = grid1(-2.0, 2.0, n, bc);
        let flea = FleaSpec::Bump1D(Bump1D::default());
        let op = assemble_hamiltonian(&g, hbar, &PotentialSpec::DoubleWell, with_flea.then_some(&flea));
        let op = match op {
            Ok(op) => op,
            Err(_) => return Ok(()),
        };
        for (i, j, v) in op.entries() {
            prop_assert_eq!(op.get(j, i).to_bits(), v.to_bits());
        }
    }

    #[test]
    fn laplacian_is_positive_semidefinite(
        nx in 3usize..14,
        ny in 3usize..14,
        hbar in 0.05f64..2.0,
        periodic in any::<bool>(),
    ) {
        let bc = if periodic { Boundary::Periodic } else { Boundary::Dirichlet };
        let g: Grid = Grid2D::new(
            ssb_core::lattice::Axis { min: -1.0, max: 1.5, n: nx },
            ssb_core::lattice::Axis { min: 0.0, max: 2.0, n: ny },
            bc,
        ).unwrap().into();
        let a = build_laplacian(&g, hbar).unwrap();
        let dense = a.to_dense();
        let norm = dense.iter().map(|v| v.abs()).fold(0.0, f64::max) * 5.0;
        let min = dense.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert!(min >= -1e-10 * norm, "smallest eigenvalue {min}");
    }

    #[test]
    fn periodic_laplacian_annihilates_constants(
        nx in 3usize..40,
        ny in 3usize..40,
        hbar in 0.01f64..1.0,
        c in -10.0f64..10.0,
    ) {
        let g: Grid = Grid2D::new(
            ssb_core::lattice::Axis { min: 0.0, max: 3.0, n: nx },
            ssb_core::lattice::Axis { min: -1.0, max: 1.0, n: ny },
            Boundary::Periodic,
        ).unwrap().into();
        let a = build_laplacian(&g, hbar).unwrap();
        let x = vec![c; g.len()];
        let mut y = vec![1.0; g.len()];
        a.apply(&x, &mut y);
        let scale = a.norm_bound() * c.abs();
        for v in y {
            prop_assert!(v.abs() <= 4.0 * f64::EPSILON * scale.max(1.0));
        }
    }
}

#[test]
fn harmonic_ground_energy_converges_at_second_order() {
    let hbar = 0.1;
    let omega = 1.0;
    let exact = hbar * omega / std::f64::consts::SQRT_2;
    let errors: Vec<f64> = [101usize, 201, 401]
        .iter()
        .map(|&n| {
            let g = grid1(-4.0, 4.0, n, Boundary::Dirichlet);
            let op =
                assemble_hamiltonian(&g, hbar, &PotentialSpec::Harmonic { omega }, None).unwrap();
            (lowest_k(&op, 1, 1e-12).unwrap().eigenvalues[0] - exact).abs()
        })
        .collect();
    for w in errors.windows(2) {
        let ratio = w[0] / w[1];
        assert!(
            (3.5..4.5).contains(&ratio),
            "refinement ratio {ratio}, errors {errors:?}"
        );
    }
}

#[test]
fn grid_rejects_degenerate_axes() {
    assert!(Grid1D::new(1.0, 1.0, 10, Boundary::Dirichlet).is_err());
    assert!(Grid1D::new(0.0, 1.0, 2, Boundary::Dirichlet).is_err());
    assert!(Grid1D::new(0.0, f64::NAN, 10, Boundary::Periodic).is_err());
}
