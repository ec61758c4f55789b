use std::collections::BTreeMap;

use nalgebra::DMatrix;
use proptest::prelude::*;

use ssb_core::eigensolve::{
    attainable_tol, degeneracy_check, lowest_k, lowest_k_with, Parity, Sector, ShiftMode,
    SolverOptions,
};
use ssb_core::lattice::{assemble_hamiltonian, Boundary, Grid, Grid1D, SparseSymmetricOperator};
use ssb_core::potentials::{Bump1D, FleaSpec, PotentialSpec};

fn random_operator(entries: &[(usize, usize, f64)], diag: &[f64]) -> SparseSymmetricOperator {
    let mut off = BTreeMap::new();
    for &(a, b, v) in entries {
        if a != b {
            off.insert((a.min(b), a.max(b)), v);
        }
    }
    let mut t: Vec<(usize, usize, f64)> =
        diag.iter().enumerate().map(|(i, &d)| (i, i, d)).collect();
    for ((i, j), v) in off {
        t.push((i, j, v));
        t.push((j, i, v));
    }
    SparseSymmetricOperator::from_triplets(diag.len(), t).unwrap()
}

fn dense_eigenvalues(op: &SparseSymmetricOperator) -> Vec<f64> {
    let mut e: Vec<f64> = op
        .to_dense()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    e.sort_by(f64::total_cmp);
    e
}

fn euclid_residual(op: &SparseSymmetricOperator, v: &[f64], lambda: f64) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let u: Vec<f64> = v.iter().map(|x| x / norm).collect();
    let mut hu = vec![0.0; u.len()];
    op.apply(&u, &mut hu);
    hu.iter()
        .zip(&u)
        .map(|(a, b)| (a - lambda * b).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn op_strategy() -> impl Strategy<Value = SparseSymmetricOperator> {
    (20usize..400).prop_flat_map(|dim| {
        (
            Just(dim),
            prop::collection::vec((0..dim, 0..dim, -1.0f64..1.0), dim..4 * dim),
            prop::collection::vec(-5.0f64..5.0, dim),
        )
            .prop_map(|(_, e, d)| random_operator(&e, &d))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn agrees_with_dense_diagonalization(op in op_strategy(), k in 1usize..5) {
        let s = lowest_k(&op, k, attainable_tol(&op, 1e-10)).unwrap();
        let dense = dense_eigenvalues(&op);
        for (i, (l, d)) in s.eigenvalues.iter().zip(&dense).take(k).enumerate() {
            prop_assert!((l - d).abs() <= 1e-8 * l.abs().max(1.0), "{i}: {l} vs {d}");
        }
    }

    #[test]
    fn residual_certificates_hold(op in op_strategy(), k in 1usize..4, tol_exp in 6i32..11) {
        let tol = attainable_tol(&op, 10f64.powi(-tol_exp));
        let s = lowest_k(&op, k, tol).unwrap();
        for i in 0..k {
            let l = s.eigenvalues[i];
            let bound = tol * l.abs().max(1.0);
            prop_assert!(s.residuals[i] <= bound);
            let r = euclid_residual(&op, &s.eigenvectors[i], l);
            prop_assert!(r <= bound + 64.0 * f64::EPSILON * op.norm_bound(), "residual {r} > {bound}");
        }
    }

    #[test]
    fn solves_are_bit_for_bit_deterministic(op in op_strategy(), seed in any::<u64>()) {
        let opts = SolverOptions::default().with_tol(1e-9).with_seed(seed);
        let a = lowest_k_with(&op, 2, &opts).unwrap();
        let b = lowest_k_with(&op, 2, &opts).unwrap();
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            prop_assert_eq!(x.to_bits(), y.to_bits());
        }
        for (u, v) in a.eigenvectors.iter().zip(&b.eigenvectors) {
            prop_assert!(u.iter().zip(v).all(|(p, q)| p.to_bits() == q.to_bits()));
        }
    }

    #[test]
    fn raising_the_potential_never_lowers_the_ground_energy(
        b in prop_oneof![-1.7f64..-1.3, -0.7f64..0.7, 1.3f64..1.7],
        c in 0.05f64..0.25,
        d in 0.001f64..1.0,
        hbar in 0.05f64..0.5,
    ) {
        let g: Grid = Grid1D::new(-2.0, 2.0, 401, Boundary::Dirichlet).unwrap().into();
        let flea = FleaSpec::Bump1D(Bump1D { b, c, d });
        let perturbed = match assemble_hamiltonian(&g, hbar, &PotentialSpec::DoubleWell, Some(&flea)) {
            Ok(op) => op,
            Err(_) => return Ok(()),
        };
        let bare = assemble_hamiltonian(&g, hbar, &PotentialSpec::DoubleWell, None).unwrap();
        let e = lowest_k(&bare, 1, attainable_tol(&bare, 1e-11)).unwrap().eigenvalues[0];
        let ed = lowest_k(&perturbed, 1, attainable_tol(&perturbed, 1e-11)).unwrap().eigenvalues[0];
        prop_assert!(ed >= e - 1e-9 * e.abs().max(1.0), "{ed} < {e}");
    }
}

#[test]
fn sector_solves_match_the_full_spectrum() {
    let g: Grid = Grid1D::new(-2.0, 2.0, 301, Boundary::Dirichlet)
        .unwrap()
        .into();
    let op = assemble_hamiltonian(&g, 0.2, &PotentialSpec::DoubleWell, None).unwrap();
    let dense = dense_eigenvalues(&op);
    let even = Sector::new(g.reflection(0).unwrap(), Parity::Even).unwrap();
    let opts = SolverOptions::default().with_tol(1e-11);
    let e = lowest_k_with(&op, 1, &opts.clone().with_sector(even.clone())).unwrap();
    let o = lowest_k_with(&op, 1, &opts.with_sector(even.with_parity(Parity::Odd))).unwrap();
    assert!((e.eigenvalues[0] - dense[0]).abs() < 1e-9);
    assert!((o.eigenvalues[0] - dense[1]).abs() < 1e-9);
    let v = &o.eigenvectors[0];
    let n = v.len();
    for i in 0..n {
        assert!((v[i] + v[n - 1 - i]).abs() < 1e-12);
    }
}

#[test]
fn shift_invert_agrees_with_plain_iteration() {
    let g: Grid = Grid1D::new(-2.0, 2.0, 801, Boundary::Dirichlet)
        .unwrap()
        .into();
    let op = assemble_hamiltonian(&g, 0.1, &PotentialSpec::DoubleWell, None).unwrap();
    let plain = lowest_k(&op, 2, 1e-10).unwrap();
    let mut opts = SolverOptions::default().with_tol(1e-10);
    opts.shift = ShiftMode::Auto;
    let shifted = lowest_k_with(&op, 2, &opts).unwrap();
    for i in 0..2 {
        assert!((plain.eigenvalues[i] - shifted.eigenvalues[i]).abs() < 1e-8);
    }
}

#[test]
fn exactly_degenerate_pairs_are_flagged() {
    let diag: Vec<f64> = (0..50)
        .map(|i| if i < 2 { -1.0 } else { i as f64 })
        .collect();
    let op = SparseSymmetricOperator::from_diagonal(&diag).unwrap();
    let s = lowest_k(&op, 2, 1e-12).unwrap();
    assert!(degeneracy_check(&s, 1e-10));
    let dense = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
    assert_eq!(dense.nrows(), 50);
}
