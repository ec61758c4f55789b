use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ssb_core::lattice::{Boundary, Grid, Grid1D};
use ssb_core::potentials::{
    bump_profile, classical_hamiltonian, classical_minima, eval_potential, validate_flea, Bump1D,
    ClassicalMinima, FleaSpec, GaussianLattice, PotentialSpec,
};

fn default_grid() -> Grid {
    Grid1D::new(-2.0, 2.0, 2001, Boundary::Dirichlet)
        .unwrap()
        .into()
}

proptest! {
    #[test]
    fn double_well_is_even(x in -5.0f64..5.0) {
        let a = eval_potential(&PotentialSpec::DoubleWell, &[x]).unwrap();
        let b = eval_potential(&PotentialSpec::DoubleWell, &[-x]).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn mexican_hat_is_rotation_invariant(x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let v = eval_potential(&PotentialSpec::MexicanHat, &[x, y]).unwrap();
        for k in 0..64 {
            let a = 2.0 * std::f64::consts::PI * k as f64 / 64.0;
            let (s, c) = a.sin_cos();
            let w = eval_potential(&PotentialSpec::MexicanHat, &[c * x - s * y, s * x + c * y]).unwrap();
            prop_assert!((v - w).abs() <= 1e-12 * v.max(1.0));
        }
    }

    #[test]
    fn bump_vanishes_continuously_at_the_edge(c in 0.05f64..1.0, eps_exp in 2i32..8) {
        let eps = 10f64.powi(-eps_exp) * c;
        let inside = bump_profile(c - eps, c);
        let outside = bump_profile(c + eps, c);
        prop_assert_eq!(outside, 0.0);
        prop_assert_eq!(bump_profile(c, c), 0.0);
        let bound = (1.0 / (c * c) - 1.0 / (2.0 * c * eps)).exp() * 1.0001 + 1e-300;
        prop_assert!(inside <= bound.max(1e-30), "inside {inside}, bound {bound}");
    }

    #[test]
    fn flea_validity_is_mirror_symmetric(b in -1.9f64..1.9, c in 0.01f64..0.6, d in -1.0f64..1.0) {
        prop_assume!(d != 0.0);
        let g = default_grid();
        let ok = |b: f64| {
            validate_flea(&PotentialSpec::DoubleWell, &FleaSpec::Bump1D(Bump1D { b, c, d }), &g)
                .unwrap()
                .is_valid()
        };
        prop_assert_eq!(ok(b), ok(-b));
    }
}

#[test]
fn valid_flea_centers_form_two_mirrored_intervals() {
    let g = default_grid();
    let (c, d) = (0.2, -0.1);
    let centers: Vec<f64> = (0..=4000).map(|i| -2.0 + 4.0 * i as f64 / 4000.0).collect();
    let valid: Vec<bool> = centers
        .iter()
        .map(|&b| {
            validate_flea(
                &PotentialSpec::DoubleWell,
                &FleaSpec::Bump1D(Bump1D { b, c, d }),
                &g,
            )
            .unwrap()
            .is_valid()
        })
        .collect();
    let mut runs = Vec::new();
    let mut start = None;
    for (i, &v) in valid.iter().enumerate() {
        match (v, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                runs.push((centers[s], centers[i - 1]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push((centers[s], centers[centers.len() - 1]));
    }
    assert!(!runs.is_empty());
    let mirrored: Vec<(f64, f64)> = runs.iter().rev().map(|&(a, b)| (-b, -a)).collect();
    for (r, m) in runs.iter().zip(&mirrored) {
        assert!(
            (r.0 - m.0).abs() < 1e-9 && (r.1 - m.1).abs() < 1e-9,
            "{runs:?}"
        );
    }
    let in_abs_b: Vec<_> = runs.iter().filter(|r| r.1 >= 0.0).collect();
    assert_eq!(
        in_abs_b.len(),
        2,
        "valid |b| set should be two intervals: {runs:?}"
    );
    assert!(
        valid[centers
            .iter()
            .position(|&b| (b - 0.65).abs() < 1e-12)
            .unwrap()]
    );
}

fn sampled_minimum(spec: &PotentialSpec, dim: usize, lo: f64, hi: f64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    (0..10_000)
        .map(|_| {
            let q: Vec<f64> = (0..dim).map(|_| rng.random_range(lo..hi)).collect();
            let p: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
            classical_hamiltonian(spec, &q, &p).unwrap()
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn classical_minima_attain_the_global_minimum() {
    let lattice = GaussianLattice::default();
    let (lo, hi) = lattice.bounds();
    let cases = [
        (PotentialSpec::DoubleWell, 1, -2.0, 2.0),
        (PotentialSpec::Harmonic { omega: 1.3 }, 1, -2.0, 2.0),
        (PotentialSpec::MexicanHat, 2, -2.0, 2.0),
        (PotentialSpec::GaussianLattice(lattice), 2, lo, hi),
    ];
    for (spec, dim, a, b) in cases {
        let points: Vec<(Vec<f64>, Vec<f64>)> = match classical_minima(&spec) {
            ClassicalMinima::FinitePoints(ps) => ps.into_iter().map(|p| (p.q, p.p)).collect(),
            ClassicalMinima::Circle { radius } => (0..16)
                .map(|k| {
                    let t = 2.0 * std::f64::consts::PI * k as f64 / 16.0;
                    (vec![radius * t.cos(), radius * t.sin()], vec![0.0, 0.0])
                })
                .collect(),
        };
        let values: Vec<f64> = points
            .iter()
            .map(|(q, p)| classical_hamiltonian(&spec, q, p).unwrap())
            .collect();
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        for v in &values {
            assert!((v - min).abs() <= 1e-12, "{spec:?}: {values:?}");
        }
        let sampled = sampled_minimum(&spec, dim, a, b);
        assert!(
            sampled >= min - 1e-12,
            "{spec:?}: sampled {sampled} below {min}"
        );
    }
}
