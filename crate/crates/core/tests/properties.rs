use std::f64::consts::TAU;

use landauer_core::detector::{self, mode_response, DetectorSpec, InteractionWindow, Trajectory};
use landauer_core::landauer::{effective_hamiltonian, landauer_budget, ReservoirSpec};
use landauer_core::linalg::{self, eigvalsh, random_density, random_hermitian, random_unitary};
use landauer_core::quantum::entropy::von_neumann_entropy;
use landauer_core::quantum::fock::{auto_cutoff, fock_moments, squeeze_operator, squeezed_thermal_state, FockCutoff};
use landauer_core::quantum::state::DensityMatrix;
use landauer_core::sts::{
    bose_einstein, certificate_tolerance, min_coefficients, positivity_certificate, sts_coefficients, sts_moments, Coefficients,
    ModeSpec,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn beta_for(nbar: f64) -> f64 {
    if nbar == 0.0 {
        40.0
    } else {
        (1.0 + 1.0 / nbar).ln()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn entropy_is_unitarily_invariant(seed in any::<u64>(), dim in 2usize..7) {
        let mut r = rng(seed);
        let rho = DensityMatrix::single(random_density(dim, &mut r)).unwrap();
        let u = random_unitary(dim, &mut r);
        let rotated = rho.conjugate(&u).unwrap();
        prop_assert!((von_neumann_entropy(&rho) - von_neumann_entropy(&rotated)).abs() <= 1e-10);
    }

    #[test]
    fn partial_trace_inverts_tensor(seed in any::<u64>(), da in 2usize..4, db in 2usize..5) {
        let mut r = rng(seed);
        let a = DensityMatrix::single(random_density(da, &mut r)).unwrap();
        let b = DensityMatrix::single(random_density(db, &mut r)).unwrap();
        let ab = a.tensor(&b);
        let a2 = ab.partial_trace(&[0]).unwrap();
        let b2 = ab.partial_trace(&[1]).unwrap();
        prop_assert!(linalg::max_abs(&(a.matrix() - a2.matrix())) <= 1e-12);
        prop_assert!(linalg::max_abs(&(b.matrix() - b2.matrix())) <= 1e-12);
    }

    #[test]
    fn squeeze_is_unitary(r in 0.0f64..1.5, theta in 0.0f64..TAU, n in 2usize..80) {
        let s = squeeze_operator(FockCutoff::new(n).unwrap(), r, theta).unwrap();
        prop_assert!(linalg::unitarity_residual(&s) <= 1e-10);
    }

    #[test]
    fn landauer_equality_and_inequality(seed in any::<u64>(), ds in 2usize..4, dr in 2usize..6, beta in 0.1f64..2.0) {
        let mut r = rng(seed);
        let spec = ReservoirSpec::new(random_hermitian(dr, 1.0, &mut r), beta, random_unitary(dr, &mut r)).unwrap();
        let rho_s = DensityMatrix::single(random_density(ds, &mut r)).unwrap();
        let b = landauer_budget(&rho_s, &spec, &random_unitary(ds * dr, &mut r)).unwrap();
        prop_assert!(b.equality_residual.abs() <= 1e-9);
        prop_assert!(b.sigma >= -1e-10);
        prop_assert!(b.decomposition_gap() <= 1e-9);
    }

    #[test]
    fn effective_hamiltonian_keeps_spectrum(seed in any::<u64>(), d in 2usize..8) {
        let mut r = rng(seed);
        let h = random_hermitian(d, 2.0, &mut r);
        let spec = ReservoirSpec::new(h.clone(), 1.0, random_unitary(d, &mut r)).unwrap();
        let before = eigvalsh(&h);
        let after = eigvalsh(&effective_hamiltonian(&spec));
        for (x, y) in before.iter().zip(&after) {
            prop_assert!((x - y).abs() <= 1e-9);
        }
    }

    #[test]
    fn coefficient_identity_on_grid(nbar in 0.0f64..3.0, p in 0.05f64..0.95, r in 0.0f64..1.5) {
        let beta = beta_for(nbar);
        let nbar = bose_einstein(beta, 1.0).unwrap();
        let (a_min, b_min) = min_coefficients(nbar, p, beta, 1.0).unwrap();
        prop_assert!(a_min >= 0.0 && b_min >= 0.0);
        let c: Coefficients = sts_coefficients(a_min, b_min, r);
        prop_assert!(c.a >= a_min && c.b >= b_min);
        prop_assert!(positivity_certificate(&c).abs() <= certificate_tolerance(&c));
    }

    #[test]
    fn moments_are_physical(omega in 0.1f64..5.0, beta in 0.05f64..10.0, r in 0.0f64..1.5, theta in 0.0f64..TAU) {
        let mode = ModeSpec::new(omega, omega, 1.0, beta, r, theta).unwrap();
        let m = sts_moments(&mode);
        prop_assert!((m.aad - m.ada - 1.0).abs() <= 1e-12);
        prop_assert!(m.aa.norm() <= m.ada + 0.5 + 1e-9);
        prop_assert!((mode.nbar() - 1.0 / (beta * omega).exp_m1()).abs() <= 1e-12 * (1.0 + mode.nbar()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn perturbative_sigma_dual_path_and_sign(
        gap in 0.2f64..3.0,
        p in 0.05f64..0.95,
        omega in 0.2f64..3.0,
        beta in 0.2f64..3.0,
        r in 0.0f64..1.5,
        theta in 0.0f64..TAU,
        s in 0.5f64..8.0,
        v in -0.9f64..0.9,
        t0 in -3.0f64..3.0,
    ) {
        let det = DetectorSpec::new(gap, p, 0.05).unwrap();
        let mode = ModeSpec::new(omega, -omega, 4.0, beta, r, theta).unwrap();
        let traj = Trajectory::Inertial { x0: 0.2, velocity: v, t0 };
        let ev = detector::evaluate(&det, &[mode], &traj, &InteractionWindow::new(s).unwrap()).unwrap();
        prop_assert!(ev.sigma >= -1e-12);
        prop_assert!(ev.dual_relative <= 1e-9);
    }

    #[test]
    fn halving_quadrature_tolerance_stays_within_estimate(
        gap in 0.2f64..3.0,
        omega in 0.2f64..3.0,
        s in 0.5f64..10.0,
        a in 0.05f64..0.4,
    ) {
        let det = DetectorSpec::new(gap, 0.5, 0.05).unwrap();
        let mode = ModeSpec::new(omega, omega, 3.0, 1.0, 0.0, 0.0).unwrap();
        let traj = Trajectory::UniformlyAccelerated { acceleration: a, t0: 0.0, x0: 0.0 };
        let coarse = mode_response(&traj, &mode, &det, &InteractionWindow::with_tol(s, 1e-9).unwrap()).unwrap();
        let fine = mode_response(&traj, &mode, &det, &InteractionWindow::with_tol(s, 5e-10).unwrap()).unwrap();
        prop_assert!((coarse.iplus - fine.iplus).norm() <= coarse.err_plus.max(1e-15));
        prop_assert!((coarse.iminus - fine.iminus).norm() <= coarse.err_minus.max(1e-15));
    }
}

/// n̄ = 3, r = 1.5 needs well over a thousand Fock levels.
#[test]
#[ignore]
fn moments_match_fock_traces_at_grid_corner() {
    let beta = beta_for(3.0);
    let theta = 0.9;
    let mode = ModeSpec::new(1.0, 1.0, 1.0, beta, 1.5, theta).unwrap();
    let cut = auto_cutoff(beta, 1.0, 1.5, theta, 1e-8).unwrap();
    let rho = squeezed_thermal_state(cut, beta, 1.0, 1.5, theta).unwrap();
    let (aa, ada, aad) = fock_moments(&rho);
    let m = sts_moments(&mode);
    assert!((aa - m.aa).norm() < 1e-7);
    assert!((ada - m.ada).abs() < 1e-7);
    assert!((aad - m.aad).abs() < 1e-7);
}
