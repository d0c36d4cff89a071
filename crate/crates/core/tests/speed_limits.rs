use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use proptest::prelude::*;
use qslprobe_core::dynamics::propagate_unitary;
use qslprobe_core::qsl::{
    corrected_mt_bound, mt_bound, orthogonalization_time, time_averaged_stats, Orthogonalization,
};
use qslprobe_core::verify::{random_hermitian, random_orthogonalizing_instance, random_state};
use qslprobe_core::{
    expectation, expm_hermitian, logm_principal_nonneg, ComplexMatrix, Energy, HamiltonianTrajectory,
    StateVector,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

// Planck constant in J·s, independent of the library's ℏ.
const PLANCK: f64 = 6.626_070_15e-34;

fn shifted_to_ground_zero(h: &ComplexMatrix) -> ComplexMatrix {
    let (vals, _) = qslprobe_core::dynamics::eigh(h).unwrap();
    h - &ComplexMatrix::identity(h.dim()).scale(vals[0])
}

#[test]
fn rabi_overlap_matches_closed_form() {
    // H = (Ω/2)σx from |0⟩: |⟨0|ψ(t)⟩| = |cos(Ωt/2)|, first zero at π/Ω.
    let omega = 2.0 * PI * 25e6;
    let h = ComplexMatrix::pauli_x().scale(omega / 2.0);
    let psi = StateVector::basis(2, 0).unwrap();
    let traj = HamiltonianTrajectory::constant(h.clone(), 1.5 * PI / omega).unwrap();
    let t = orthogonalization_time(&traj, &psi, 1e-9, 64).unwrap().time().unwrap();
    assert!((t * omega / PI - 1.0).abs() < 1e-8);

    let u = expm_hermitian(&h, -0.3 * PI / omega).unwrap();
    let amp = u.apply(&psi).amplitude(0).norm();
    assert!((amp - (0.15 * PI).cos()).abs() < 1e-14);
}

#[test]
fn energy_units_against_planck() {
    let e = Energy::from_hertz(5e9);
    assert!((e.joules() / (PLANCK * 5e9) - 1.0).abs() < 1e-9);
    let w = Energy::from_joules(PLANCK * 1e6).angular_frequency();
    assert!((w / (2.0 * PI * 1e6) - 1.0).abs() < 1e-9);
}

#[test]
fn corrected_bound_closed_form() {
    let de = Energy::from_angular_frequency(3.0e8);
    assert_eq!(corrected_mt_bound(de, 0.0).unwrap(), mt_bound(de).unwrap());
    let t = corrected_mt_bound(de, 0.25).unwrap();
    // arccos(1/2) = π/3
    assert!((t * 3.0e8 / (PI / 3.0) - 1.0).abs() < 1e-14);
}

#[test]
fn mt_tight_for_balanced_two_level_state() {
    let e0 = 4.0e7;
    let h = ComplexMatrix::from_real_diagonal(&[0.0, 2.0 * e0]);
    let psi = StateVector::from_real(&[1.0, 1.0]).unwrap();
    let tau = FRAC_PI_2 / e0;
    let stats = time_averaged_stats(&HamiltonianTrajectory::constant(h, tau).unwrap(), &psi, 32).unwrap();
    assert!((stats.energy_stddev.angular_frequency() / e0 - 1.0).abs() < 1e-12);
    assert!((stats.mean_energy.angular_frequency() / e0 - 1.0).abs() < 1e-12);
    assert!((stats.effective_energy.angular_frequency() / e0 - 1.0).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn constant_propagation_is_exact(seed in any::<u64>(), dim in 2usize..5, t in 0.1f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hermitian(&mut rng, dim);
        let u = propagate_unitary(&HamiltonianTrajectory::constant(h.clone(), t).unwrap(), 16).unwrap();
        let exact = expm_hermitian(&h, -t).unwrap();
        prop_assert!((&u - &exact).frobenius_norm() < 1e-10);
        prop_assert!(u.unitarity_defect() < 1e-10);
    }

    #[test]
    fn logm_inverts_expm_on_nonneg_branch(seed in any::<u64>(), dim in 2usize..6, tau in 0.2f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = shifted_to_ground_zero(&random_hermitian(&mut rng, dim));
        let spread = qslprobe_core::dynamics::spectral_spread(&h).unwrap();
        // keep the spectrum inside [0, 2π/τ)
        let h = h.scale(0.9 * 2.0 * PI / tau / spread);
        let u = expm_hermitian(&h, -tau).unwrap();
        let back = logm_principal_nonneg(&u, tau).unwrap();
        prop_assert!((&back - &h).frobenius_norm() < 1e-8 * h.frobenius_norm());
    }

    #[test]
    fn expectation_is_real_part_of_quadratic_form(seed in any::<u64>(), dim in 2usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hermitian(&mut rng, dim);
        let psi = random_state(&mut rng, dim);
        let direct: Complex64 = psi
            .amplitudes()
            .iter()
            .zip(h.apply(&psi).amplitudes())
            .map(|(a, b)| a.conj() * b)
            .sum();
        prop_assert!(direct.im.abs() < 1e-12);
        prop_assert!((expectation(&psi, &h).unwrap() - direct.re).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn orthogonalization_respects_mt(seed in any::<u64>(), dim in prop::sample::select(vec![2usize, 4])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_orthogonalizing_instance(&mut rng, dim, 256, None).unwrap();
        let reached = orthogonalization_time(&inst.trajectory, &inst.psi0, 1e-6, 256).unwrap();
        if let Orthogonalization::Reached { time, .. } = reached {
            let stats = time_averaged_stats(&inst.trajectory.restricted(time).unwrap(), &inst.psi0, 256).unwrap();
            prop_assert!(time * stats.energy_stddev.angular_frequency() >= FRAC_PI_2 * (1.0 - 1e-6));
        }
    }
}
