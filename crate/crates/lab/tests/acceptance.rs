//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits nonzero when any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ssb_core::lattice::{Boundary, Grid, Grid1D};
use ssb_core::semiclassics::{berezin_quantize, expectation, husimi_complex, PhaseGrid};
use ssb_core::spin::{cw_ground, cw_hamiltonian};
use ssb_lab::config::{
    AndersonParams, CwParams, DoublewellParams, FleaParams, GapParams, HarmonicParams, IsingParams,
    MetalParams, MexicanParams,
};
use ssb_lab::experiments::{anderson, cw, doublewell, gap, harmonic, ising, metal, mexican, Ctx};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn criterion(id: usize, name: &str, limit: Duration, check: impl FnOnce() -> Verdict) -> bool {
    let start = Instant::now();
    let v = check();
    let elapsed = start.elapsed();
    let in_time = elapsed < limit;
    let pass = v.pass && in_time;
    println!(
        "{} criterion {id:>2} {name}: {} [{:.1} s, limit {} s]",
        if pass { "PASS" } else { "FAIL" },
        v.detail,
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    pass
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn harmonic_oracle() -> Verdict {
    let p = HarmonicParams::default();
    assert_eq!((p.hbar, p.omega), (0.1, 1.0));
    let out = harmonic::run(&p, &Ctx::default());
    let Some(r) = out.task.ok() else {
        return verdict(false, format!("solver failed: {:?}", out.task.outcome));
    };
    let exact = p.hbar * p.omega / 2f64.sqrt();
    let e_err = ((r.e0 - exact) / exact).abs();
    let phase = PhaseGrid::square_1d(p.phase_min, p.phase_max, p.phase_nodes).unwrap();
    let h_err = r
        .density
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let (q, pp) = phase.point(i);
            (v - (-(q[0] * q[0] + pp[0] * pp[0]) / (2.0 * p.hbar)).exp()).abs()
        })
        .fold(0.0, f64::max);
    verdict(
        e_err <= 1e-4 && h_err <= 1e-4,
        format!("E0 rel err {e_err:.3e} (<= 1e-4), Husimi max err {h_err:.3e} (<= 1e-4)"),
    )
}

fn unperturbed_double_well() -> Verdict {
    let p = DoublewellParams {
        flea: None,
        ..DoublewellParams::default()
    };
    let out = doublewell::run(&p, &Ctx::default());
    let rows: Vec<_> = out.rows().collect();
    if rows.len() != 4 {
        return verdict(false, format!("{} of 4 solves succeeded", rows.len()));
    }
    let worst = rows
        .iter()
        .map(|r| (r.husimi_right - 0.5).abs())
        .fold(0.0, f64::max);
    let dev = rows
        .iter()
        .find(|r| r.hbar == 0.01)
        .map_or(f64::INFINITY, |r| r.limit_deviation);
    verdict(
        worst <= 1e-2 && dev <= 1e-2,
        format!("max |mass - 0.5| {worst:.3e} (<= 1e-2), limit deviation at hbar=0.01 {dev:.3e} (<= 1e-2)"),
    )
}

fn flea_localization() -> Verdict {
    let p = DoublewellParams::default();
    assert_eq!(
        p.flea,
        Some(FleaParams {
            b: 0.65,
            c: 0.2,
            d: -0.1
        })
    );
    let out = doublewell::run(&p, &Ctx::default());
    let rows: Vec<_> = out.rows().collect();
    if rows.len() != 4 || out.predicted_side == 0 {
        return verdict(false, format!("{} of 4 solves succeeded", rows.len()));
    }
    let localized = |h: f64| {
        rows.iter().find(|r| r.hbar == h).map_or(f64::NAN, |r| {
            if out.predicted_side > 0 {
                r.husimi_right
            } else {
                1.0 - r.husimi_right
            }
        })
    };
    let (m_hi, m_lo) = (localized(0.5), localized(0.01));
    let nondegenerate = rows.iter().all(|r| !r.degenerate);
    verdict(
        (0.4..=0.6).contains(&m_hi) && m_lo >= 0.99 && nondegenerate,
        format!("mass {m_hi:.4} at hbar=0.5 (in [0.4, 0.6]), {m_lo:.6} at hbar=0.01 (>= 0.99), nondegenerate {nondegenerate}"),
    )
}

fn gap_scaling() -> Verdict {
    let p = GapParams::default();
    let out = gap::run(&p, &Ctx::default());
    let span_ok = out.scaling.rows.len() == 8
        && out
            .scaling
            .rows
            .iter()
            .all(|r| (0.05 - 1e-12..=0.3 + 1e-12).contains(&r.hbar));
    let r2 = out.scaling.exponential.map_or(f64::NAN, |f| f.r_squared);
    verdict(
        span_ok && r2 >= 0.99,
        format!(
            "{} points, R^2 of ln gap vs 1/hbar {r2:.6} (>= 0.99)",
            out.scaling.rows.len()
        ),
    )
}

fn anderson_pair() -> Verdict {
    let p = AndersonParams::default();
    assert_eq!(p.hbar, 0.05);
    let out = anderson::run(&p, &Ctx::default());
    let Some(r) = out.task.ok() else {
        return verdict(false, format!("solver failed: {:?}", out.task.outcome));
    };
    let masses: Vec<f64> = r
        .states
        .iter()
        .map(|s| s.husimi_right.max(1.0 - s.husimi_right))
        .collect();
    let target = 0.5 * (r.e0 + r.e1);
    let err = r
        .states
        .iter()
        .map(|s| (s.energy - target).abs())
        .fold(0.0, f64::max);
    let opposite = (r.states[0].husimi_right - 0.5) * (r.states[1].husimi_right - 0.5) < 0.0;
    verdict(
        masses.iter().all(|m| *m >= 0.95) && opposite && err <= r.tolerance,
        format!(
            "half-plane masses {:.6} and {:.6} (>= 0.95), energy error {err:.3e} (<= {:.3e})",
            masses[0], masses[1], r.tolerance
        ),
    )
}

fn metal() -> Verdict {
    let p = MetalParams::default();
    assert_eq!((p.lattice.cells, p.delta, p.lattice.v0), (7, 0.1, -5.0));
    let out = metal::run(&p, &Ctx::default());
    let row = |h: f64| {
        out.tasks
            .iter()
            .filter_map(|t| t.ok())
            .find(|r| r.hbar == h)
    };
    let (Some(coarse), Some(fine)) = (row(0.1), row(0.025)) else {
        return verdict(false, "a solve failed".into());
    };
    let nondegenerate = !coarse.degenerate && !fine.degenerate;
    verdict(
        fine.center_mass >= 0.9 && coarse.max_mass < 0.5 && nondegenerate,
        format!(
            "center mass {:.6} at hbar=0.025 (>= 0.9), max cell mass {:.6} at hbar=0.1 (< 0.5), nondegenerate {nondegenerate}",
            fine.center_mass, coarse.max_mass
        ),
    )
}

fn berezin_duality() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let grid: Grid = Grid1D::new(-2.0, 2.0, 200, Boundary::Dirichlet)
        .unwrap()
        .into();
    let w = grid.weight();
    let phase = PhaseGrid::square_1d(-2.0, 2.0, 41).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let hbar = rng.random_range(0.05..0.3);
        let mut psi: Vec<Complex<f64>> = (0..200)
            .map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        psi[0] = Complex::new(0.0, 0.0);
        psi[199] = Complex::new(0.0, 0.0);
        let norm = (psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * w).sqrt();
        psi.iter_mut().for_each(|z| *z /= norm);
        let a: [f64; 5] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let k: f64 = rng.random_range(0.5..3.0);
        let f = phase.sample(|q, p| {
            a[0] + a[1] * q[0] * q[0]
                + a[2] * p[0]
                + a[3] * (k * q[0] + p[0]).cos()
                + a[4] * (-(q[0] - p[0]).powi(2)).exp()
        });
        let lhs = expectation(&berezin_quantize(&f, hbar, &phase, &grid).unwrap(), &psi, w);
        let rhs = husimi_complex(&psi, &grid, hbar, &phase)
            .unwrap()
            .integrate(&f);
        worst = worst.max((lhs - Complex::new(rhs, 0.0)).norm());
    }
    verdict(
        worst <= 1e-8,
        format!("max duality defect over 20 pairs {worst:.3e} (<= 1e-8)"),
    )
}

fn brute_force_cw(n: usize, j: f64, b: f64) -> f64 {
    let dim = 1usize << n;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for s in 0..dim {
        let mz = 2.0 * s.count_ones() as f64 - n as f64;
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

fn curie_weiss() -> Verdict {
    let p = CwParams {
        sizes: vec![50, 200],
        flea: None,
        ..CwParams::default()
    };
    assert_eq!((p.j, p.b), (1.0, 0.5));
    let mut sector_err: f64 = 0.0;
    for n in 1..=8 {
        let full = brute_force_cw(n, p.j, p.b);
        let dense = cw_hamiltonian(n, p.j, p.b)
            .unwrap()
            .symmetric_eigenvalues()
            .min();
        let ground = cw_ground(n, p.j, p.b, None).unwrap().energy;
        sector_err = sector_err
            .max((full - dense).abs())
            .max((full - ground).abs());
    }
    let x_star = p.b / p.j;
    let z2_star = 1.0 - x_star * x_star;
    let out = cw::run(&p, &Ctx::default());
    let errs: Vec<(f64, f64)> = out
        .rows(cw::Variant::Symmetric)
        .map(|r| {
            (
                (r.ground.point.x - x_star).abs(),
                (r.ground.point.z2 - z2_star).abs(),
            )
        })
        .collect();
    if errs.len() != 2 {
        return verdict(false, "a Dicke-sector solve failed".into());
    }
    let converging = errs[1].0 < errs[0].0 && errs[1].1 < errs[0].1;
    verdict(
        sector_err <= 1e-8 && converging,
        format!(
            "sector vs full max err {sector_err:.3e} (<= 1e-8), x err {:.4e} -> {:.4e}, z^2 err {:.4e} -> {:.4e} (N=50 -> 200)",
            errs[0].0, errs[1].0, errs[0].1, errs[1].1
        ),
    )
}

fn ising_limits() -> Verdict {
    let p = IsingParams::default();
    assert_eq!(
        (p.j, p.b, p.sizes.len(), p.epsilons.len()),
        (1.0, 0.5, 9, 6)
    );
    let out = ising::run(&p, &Ctx::default());
    let Some(limits) = &out.limits else {
        return verdict(false, "a chain solve failed".into());
    };
    let rows = limits.rows_decay.iter().all(|b| *b);
    let cols = limits.columns_nondecreasing.iter().all(|b| *b);
    let odd = out.odd_defect(p.epsilons.len()).unwrap_or(f64::INFINITY);
    let signs = out.signs_ok();
    verdict(
        rows && cols && odd <= 1e-8 && signs,
        format!("rows decay {rows}, columns nondecreasing {cols}, oddness defect {odd:.3e} (<= 1e-8), sign(m) = -sign(eps) {signs}"),
    )
}

fn mexican_hat() -> Verdict {
    let p = MexicanParams::default();
    assert_eq!(p.theta, 0.0);
    let out = mexican::run(&p, &Ctx::default());
    let offsets: Vec<usize> = out
        .towers
        .iter()
        .filter_map(|t| t.ok())
        .filter_map(|s| s.towers.iter().find(|r| r.big_n == 3))
        .map(|r| r.peak_offset_bins)
        .collect();
    let masses: Vec<f64> = out
        .fleas
        .iter()
        .filter_map(|t| t.ok())
        .map(|r| r.half_plane_mass)
        .collect();
    let ok = offsets.len() == p.hbars.len()
        && offsets.iter().all(|o| *o <= 1)
        && masses.len() == p.hbars.len()
        && masses.iter().all(|m| (0.4..=0.6).contains(m));
    verdict(
        ok,
        format!("N=3 peak offsets {offsets:?} bins (<= 1), flea half-plane masses {masses:?} (in [0.4, 0.6])"),
    )
}

fn main() -> ExitCode {
    let results = [
        criterion(1, "harmonic oracle", secs(10), harmonic_oracle),
        criterion(
            2,
            "unperturbed double well",
            secs(120),
            unperturbed_double_well,
        ),
        criterion(3, "flea localization", secs(120), flea_localization),
        criterion(4, "gap scaling", secs(120), gap_scaling),
        criterion(5, "anderson pair", secs(60), anderson_pair),
        criterion(6, "2D metal", secs(900), metal),
        criterion(7, "berezin duality", secs(60), berezin_duality),
        criterion(8, "curie-weiss", secs(60), curie_weiss),
        criterion(9, "ising order of limits", secs(600), ising_limits),
        criterion(10, "mexican hat", secs(600), mexican_hat),
    ];
    let passed = results.iter().filter(|p| **p).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
