use nalgebra::DMatrix;
use proptest::prelude::*;

use ssb_core::spin::{
    cw_ground, cw_hamiltonian, ising_ground_magnetization, ChainBoundary, IsingChain, SpinFlea,
};

/// `-(J / 2N) (sum sigma_z)^2 - B sum sigma_x` on the full `2^N` space.
fn brute_force_cw(n: usize, j: f64, b: f64) -> f64 {
    let dim = 1usize << n;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for s in 0..dim {
        let up = s.count_ones() as f64;
        let mz = 2.0 * up - n as f64;
        h[(s, s)] = -j / (2.0 * n as f64) * mz * mz;
        for site in 0..n {
            h[(s ^ (1 << site), s)] -= b;
        }
    }
    h.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

fn dense_min(h: &DMatrix<f64>) -> f64 {
    h.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dicke_sector_holds_the_ground_energy(n in 1usize..=8, j in 0.1f64..3.0, b in 0.0f64..3.0) {
        let full = brute_force_cw(n, j, b);
        let sector = dense_min(&cw_hamiltonian(n, j, b).unwrap());
        let ground = cw_ground(n, j, b, None).unwrap().energy;
        prop_assert!((full - sector).abs() <= 1e-8, "{full} vs {sector}");
        prop_assert!((full - ground).abs() <= 1e-8, "{full} vs {ground}");
    }

    #[test]
    fn magnetization_stays_in_the_unit_ball(
        n in 1usize..120,
        j in 0.2f64..2.0,
        ratio in 0.0f64..2.0,
        d in -0.5f64..0.5,
        odd in any::<bool>(),
    ) {
        let b = ratio * j;
        let flea = SpinFlea { b: 0.3, c: 0.05, d, odd };
        let flea = flea.validate(j, b).is_ok().then_some(flea);
        let g = cw_ground(n, j, b, flea.as_ref()).unwrap();
        prop_assert!(g.point.norm_sq() <= 1.0 + 1e-8);
        prop_assert!(g.point.z2 <= 1.0 + 1e-12 && g.point.z2 >= 0.0);
    }

    #[test]
    fn flipping_an_odd_flea_flips_the_magnetization(
        n in 2usize..150,
        d in prop_oneof![-0.5f64..-0.01, 0.01f64..0.5],
        fb in 0.45f64..0.65,
    ) {
        let flea = SpinFlea { b: fb, c: 0.2, d, odd: true };
        prop_assume!(flea.validate(1.0, 0.5).is_ok());
        let g = cw_ground(n, 1.0, 0.5, Some(&flea)).unwrap();
        // The ground vector is only determined to rounding / gap.
        prop_assume!(g.gap > 1e-6);
        let a = g.point.z;
        let f = cw_ground(n, 1.0, 0.5, Some(&flea.flipped())).unwrap().point.z;
        prop_assert!((a + f).abs() <= 1e-8, "{a} vs {f}");
    }

    #[test]
    fn ising_magnetization_is_odd_in_the_field(
        n in 2usize..=10,
        exp in 1.0f64..7.0,
        b in 0.1f64..1.5,
        open in any::<bool>(),
    ) {
        let eps = 10f64.powf(-exp);
        let bc = if open { ChainBoundary::Open } else { ChainBoundary::Periodic };
        let plus = ising_ground_magnetization(&IsingChain::new(n, 1.0, b, eps, bc).unwrap()).unwrap();
        let minus = ising_ground_magnetization(&IsingChain::new(n, 1.0, b, -eps, bc).unwrap()).unwrap();
        prop_assert!((plus + minus).abs() <= 1e-8);
        prop_assert!(plus < 0.0, "m = {plus} for epsilon = {eps}");
    }
}

#[test]
fn single_spin_energy_matches_the_closed_form() {
    let g = cw_ground(1, 1.0, 0.5, None).unwrap();
    assert!((g.energy + 1.0).abs() < 1e-12);
}

#[test]
fn ising_chain_length_is_bounded() {
    assert!(IsingChain::new(0, 1.0, 0.5, 0.1, ChainBoundary::Periodic).is_err());
    assert!(IsingChain::new(15, 1.0, 0.5, 0.1, ChainBoundary::Periodic).is_err());
    assert!(IsingChain::new(14, 1.0, 0.5, 0.1, ChainBoundary::Periodic).is_ok());
}
