//! Quantum speed limits: Mandelstam–Tamm and Margolus–Levitin bounds, their
//! inversion into energy lower bounds, time-averaged energy statistics and
//! orthogonalization-time search.

use std::f64::consts::FRAC_PI_2;

use crate::dynamics::{
    expectation, logm_principal_nonneg, min_eigenvalue, propagate, spectral_spread,
    variance, ComplexMatrix, HamiltonianTrajectory, Propagation, StateVector,
};
use crate::error::{Error, Result};
use crate::units::Energy;

/// Default threshold on |⟨ψ₀|ψ(t)⟩| for calling two states orthogonal.
pub const DEFAULT_ORTHOGONALITY_TOL: f64 = 1e-6;

/// Largest orthogonality tolerance accepted by [`orthogonalization_time`].
pub const MAX_ORTHOGONALITY_TOL: f64 = 1e-3;

/// Time-averaged energy statistics of an evolution on [0, T].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyStats {
    /// (1/T)∫⟨H(t)⟩ dt
    pub mean_energy: Energy,
    /// (1/T)∫ΔE(t) dt, the average of the instantaneous standard deviation.
    pub energy_stddev: Energy,
    /// ⟨ψ₀|H_eff|ψ₀⟩ on the nonnegative branch.
    pub effective_energy: Energy,
    pub duration: f64,
}

/// Time-averaged mean energy and energy spread along the propagated state.
///
/// The quadrature uses the integrator's own step Hamiltonians: within a step
/// the Hamiltonian is constant, so ⟨H⟩ and ΔE are constant too and the sum is
/// exact for the evolution that was actually integrated.
pub fn time_averaged_stats(
    h: &HamiltonianTrajectory,
    psi0: &StateVector,
    steps: usize,
) -> Result<EnergyStats> {
    let prop = propagate(h, psi0, steps)?;
    stats_from_propagation(&prop, psi0)
}

pub(crate) fn stats_from_propagation(prop: &Propagation, psi0: &StateVector) -> Result<EnergyStats> {
    let (mean, spread) = averaged_mean_and_spread(prop);
    let duration = prop.duration();
    let h_eff = logm_principal_nonneg(prop.final_unitary(), duration)?;
    Ok(EnergyStats {
        mean_energy: Energy::from_angular_frequency(mean),
        energy_stddev: Energy::from_angular_frequency(spread),
        effective_energy: Energy::from_angular_frequency(expectation(psi0, &h_eff)?),
        duration,
    })
}

fn averaged_mean_and_spread(prop: &Propagation) -> (f64, f64) {
    let n = prop.steps() as f64;
    let (sum_mean, sum_std) = prop
        .step_energy_stats()
        .into_iter()
        .fold((0.0, 0.0), |(a, b), (m, s)| (a + m, b + s));
    (sum_mean / n, sum_std / n)
}

fn positive_energy(e: Energy) -> Result<f64> {
    let w = e.angular_frequency();
    if w > 0.0 && w.is_finite() {
        Ok(w)
    } else {
        Err(Error::InvalidEnergy(e.joules()))
    }
}

/// Mandelstam–Tamm time πℏ/(2ΔE).
pub fn mt_bound(delta_e: Energy) -> Result<f64> {
    Ok(FRAC_PI_2 / positive_energy(delta_e)?)
}

/// Margolus–Levitin time πℏ/(2E), for time-independent Hamiltonians whose
/// ground energy is zero.
pub fn ml_bound(mean_energy: Energy) -> Result<f64> {
    Ok(FRAC_PI_2 / positive_energy(mean_energy)?)
}

/// Lower bounds (E, ΔE) ≥ πℏ/(2τ) implied by orthogonalizing in time τ.
pub fn invert_qsl(tau: f64) -> Result<(Energy, Energy)> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidDuration(tau));
    }
    let e = Energy::from_angular_frequency(FRAC_PI_2 / tau);
    Ok((e, e))
}

/// MT bound for reaching a state at fidelity error ε from the orthogonal
/// target: ℏ·arccos(√ε)/ΔE.
pub fn corrected_mt_bound(delta_e: Energy, epsilon: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::InvalidFidelity(epsilon));
    }
    Ok(epsilon.sqrt().acos() / positive_energy(delta_e)?)
}

/// MT and (when applicable) ML orthogonalization times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QslBounds {
    pub t_mt: f64,
    pub t_ml: Option<f64>,
    pub t_effective: f64,
}

impl QslBounds {
    fn assemble(t_mt: f64, t_ml: Option<f64>) -> Self {
        let t_effective = t_ml.map_or(t_mt, |ml| ml.max(t_mt));
        Self {
            t_mt,
            t_ml,
            t_effective,
        }
    }

    /// Bounds for a time-dependent evolution. The ML time is attached to the
    /// effective Hamiltonian, whose spectrum is nonnegative by construction.
    pub fn for_trajectory(stats: &EnergyStats) -> Result<Self> {
        let t_mt = mt_bound(stats.energy_stddev)?;
        let t_ml = ml_bound(stats.effective_energy).ok();
        Ok(Self::assemble(t_mt, t_ml))
    }

    /// Bounds for a constant Hamiltonian. With `shift_ground_to_zero` the
    /// lowest eigenvalue is subtracted first; otherwise the ML time is only
    /// reported when the ground energy already is zero.
    pub fn time_independent(
        h: &ComplexMatrix,
        psi0: &StateVector,
        shift_ground_to_zero: bool,
    ) -> Result<Self> {
        let ground = min_eigenvalue(h)?;
        let delta = variance(psi0, h)?.sqrt();
        let t_mt = mt_bound(Energy::from_angular_frequency(delta))?;
        let ground_is_zero = ground.abs() <= 1e-12 * h.max_abs().max(f64::MIN_POSITIVE);
        let t_ml = if shift_ground_to_zero || ground_is_zero {
            let shift = if shift_ground_to_zero { ground } else { 0.0 };
            let mean = expectation(psi0, h)? - shift;
            ml_bound(Energy::from_angular_frequency(mean)).ok()
        } else {
            None
        };
        Ok(Self::assemble(t_mt, t_ml))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Orthogonalization {
    Reached { time: f64, overlap: f64 },
    NotReached { min_overlap: f64 },
}

impl Orthogonalization {
    pub fn time(&self) -> Option<f64> {
        match self {
            Orthogonalization::Reached { time, .. } => Some(*time),
            Orthogonalization::NotReached { .. } => None,
        }
    }
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// First time t ∈ (0, T] with |⟨ψ₀|ψ(t)⟩| ≤ `tol`.
pub fn orthogonalization_time(
    h: &HamiltonianTrajectory,
    psi0: &StateVector,
    tol: f64,
    steps: usize,
) -> Result<Orthogonalization> {
    if !(tol > 0.0 && tol <= MAX_ORTHOGONALITY_TOL) {
        return Err(Error::InvalidArgument(format!(
            "orthogonality tolerance must lie in (0, {MAX_ORTHOGONALITY_TOL}], got {tol}"
        )));
    }
    overlap_crossing_time(h, psi0, tol, steps)
}

/// First time t ∈ (0, T] with |⟨ψ₀|ψ(t)⟩| ≤ `level`, for any level in (0, 1).
///
/// Grid points are screened with the Lipschitz bound |d|⟨ψ₀|ψ⟩|/dt| ≤
/// spread(H)/2, so any step that can contain a crossing is refined: the
/// overlap is minimized inside the step window, then the first crossing is
/// bisected to 1e-12·T.
pub fn overlap_crossing_time(
    h: &HamiltonianTrajectory,
    psi0: &StateVector,
    level: f64,
    steps: usize,
) -> Result<Orthogonalization> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "overlap level must lie in (0, 1), got {level}"
        )));
    }
    let tol = level;
    let prop = propagate(h, psi0, steps)?;
    let overlap_at = |t: f64| -> Result<f64> {
        let s = prop.state_at(t)?;
        Ok(crate::dynamics::overlap(psi0, &s)?.norm())
    };
    let grid: Vec<f64> = prop
        .states
        .iter()
        .map(|s| crate::dynamics::overlap(psi0, s).map(|z| z.norm()))
        .collect::<Result<_>>()?;

    let mut max_spread: f64 = 0.0;
    for hk in &prop.step_hamiltonians {
        max_spread = max_spread.max(spectral_spread(hk)?);
    }
    let dt = prop.step_size();
    let bracket = 2.0 * tol + 0.5 * max_spread * dt;
    let resolution = 1e-12 * h.duration();
    let n = prop.steps();

    for k in 1..=n {
        if grid[k] > bracket {
            continue;
        }
        let lo = prop.times[k - 1];
        let hi = prop.times[(k + 1).min(n)];
        let (mut t_min, mut f_min) = golden_minimum(&overlap_at, lo, hi, resolution)?;
        if grid[k] < f_min {
            t_min = prop.times[k];
            f_min = grid[k];
        }
        if f_min > tol {
            continue;
        }
        // Bisect the first crossing between lo (above tol) and t_min.
        // grid[k - 1] > tol here, otherwise the previous window would have hit.
        let (mut a, mut b) = (lo, t_min);
        while b - a > resolution {
            let mid = 0.5 * (a + b);
            if overlap_at(mid)? <= tol {
                b = mid;
            } else {
                a = mid;
            }
        }
        return Ok(Orthogonalization::Reached {
            time: b,
            overlap: overlap_at(b)?,
        });
    }
    let min_overlap = grid[1..].iter().copied().fold(f64::INFINITY, f64::min);
    Ok(Orthogonalization::NotReached { min_overlap })
}

fn golden_minimum(
    f: &impl Fn(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    resolution: f64,
) -> Result<(f64, f64)> {
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > resolution {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::HBAR;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn round_sig(x: f64, digits: i32) -> f64 {
        let scale = 10f64.powi(digits - 1 - x.abs().log10().floor() as i32);
        (x * scale).round() / scale
    }

    fn rabi(omega: f64, duration: f64) -> HamiltonianTrajectory {
        HamiltonianTrajectory::constant(ComplexMatrix::pauli_x().scale(omega / 2.0), duration).unwrap()
    }

    #[test]
    fn stats_for_constant_rabi_drive() {
        let omega = 2.0 * PI * 10e6;
        let psi0 = StateVector::basis(2, 0).unwrap();
        let s = time_averaged_stats(&rabi(omega, 80e-9), &psi0, 64).unwrap();
        assert!(s.mean_energy.angular_frequency().abs() < 1e-9 * omega);
        assert!((s.energy_stddev.angular_frequency() - omega / 2.0).abs() < 1e-12 * omega);

        let shifted = rabi(omega, 80e-9).shift_ground_to_zero(8).unwrap();
        let s = time_averaged_stats(&shifted, &psi0, 64).unwrap();
        assert!((s.mean_energy.angular_frequency() - omega / 2.0).abs() < 1e-9 * omega);
        assert!((s.energy_stddev.angular_frequency() - omega / 2.0).abs() < 1e-9 * omega);
        assert_eq!(round_sig(s.mean_energy.joules(), 2), 3.3e-27);
        assert_eq!(round_sig(s.energy_stddev.joules(), 2), 3.3e-27);
    }

    #[test]
    fn mt_bound_examples() {
        let t = mt_bound(Energy::from_joules(5.2e-27)).unwrap();
        assert_eq!(round_sig(t, 2), 32e-9);
        let omega = 2.0 * PI * 10e6;
        let t = mt_bound(Energy::from_angular_frequency(omega / 2.0)).unwrap();
        assert!((t - 50e-9).abs() < 1e-21);
        let t = mt_bound(Energy::from_joules(1.0)).unwrap();
        assert!((t - PI * HBAR / 2.0).abs() < 1e-15 * t);
        assert_eq!(round_sig(t, 3), 1.66e-34);
        assert!(matches!(mt_bound(Energy::ZERO), Err(Error::InvalidEnergy(_))));
        assert!(mt_bound(Energy::from_joules(-1.0)).is_err());
    }

    #[test]
    fn ml_bound_examples() {
        // 2.4e-27 J carries two significant figures of the 70 ns gate.
        let t = ml_bound(Energy::from_joules(2.4e-27)).unwrap();
        assert!((t - 70e-9).abs() / 70e-9 < 0.025, "{t:e}");
        let t = ml_bound(Energy::from_joules(PI * HBAR / 2.0)).unwrap();
        assert!((t - 1.0).abs() < 1e-15);
        let t = ml_bound(Energy::from_joules(3.3e-28)).unwrap();
        assert_eq!(round_sig(t, 3), 502e-9);
        assert!(ml_bound(Energy::ZERO).is_err());
    }

    #[test]
    fn invert_qsl_table_values() {
        let (e1, d1) = invert_qsl(32e-9).unwrap();
        assert_eq!(e1, d1);
        assert_eq!(round_sig(e1.joules(), 2), 5.2e-27);
        assert_eq!(round_sig(invert_qsl(70e-9).unwrap().0.joules(), 2), 2.4e-27);
        assert_eq!(round_sig(invert_qsl(500e-9).unwrap().0.joules(), 1), 3e-28);
        assert!(matches!(invert_qsl(0.0), Err(Error::InvalidDuration(_))));
        assert!(invert_qsl(-1e-9).is_err());
    }

    #[test]
    fn corrected_bound_examples() {
        let de = Energy::from_angular_frequency(PI / (2.0 * 32e-9));
        assert!((corrected_mt_bound(de, 0.0).unwrap() - mt_bound(de).unwrap()).abs() < 1e-22);
        let t = corrected_mt_bound(de, 0.01).unwrap();
        let expected = 32e-9 * (0.1f64.acos() / (PI / 2.0));
        assert!((t - expected).abs() < 1e-20);
        assert!((t - 29.96e-9).abs() < 0.01e-9);
        for eps in [1e-6, 1e-5, 1e-4, 1e-3] {
            let ratio = corrected_mt_bound(de, eps).unwrap() / mt_bound(de).unwrap();
            assert!((ratio - (1.0 - 2.0 * eps.sqrt() / PI)).abs() <= eps);
        }
        assert!(matches!(
            corrected_mt_bound(de, 1.0),
            Err(Error::InvalidFidelity(_))
        ));
        assert!(corrected_mt_bound(de, -0.1).is_err());
    }

    #[test]
    fn rabi_orthogonalizes_at_pi_over_omega() {
        let omega = 2.0 * PI * 10e6;
        let psi0 = StateVector::basis(2, 0).unwrap();
        // Duration chosen so that π/Ω does not fall on the grid.
        let r = orthogonalization_time(&rabi(omega, 83e-9), &psi0, 1e-9, 200).unwrap();
        let t = r.time().expect("reached");
        assert!((t - PI / omega).abs() < 1e-8 * PI / omega, "{t:e}");
    }

    #[test]
    fn phase_only_evolution_never_orthogonalizes() {
        let w = 1e8;
        let h = HamiltonianTrajectory::constant(ComplexMatrix::pauli_z().scale(w), 1e-7).unwrap();
        let r = orthogonalization_time(&h, &StateVector::basis(2, 0).unwrap(), 1e-6, 64).unwrap();
        assert!(matches!(r, Orthogonalization::NotReached { .. }));
    }

    #[test]
    fn sigma_z_on_plus_state() {
        let w = 1e8;
        let h = HamiltonianTrajectory::constant(ComplexMatrix::pauli_z().scale(w), 3e-8).unwrap();
        let plus = StateVector::from_real(&[1.0, 1.0]).unwrap();
        let t = orthogonalization_time(&h, &plus, 1e-10, 100)
            .unwrap()
            .time()
            .unwrap();
        assert!((t - PI / (2.0 * w)).abs() < 1e-9 * t);
    }

    #[test]
    fn tolerance_validated() {
        let h = rabi(1e8, 1e-7);
        let psi0 = StateVector::basis(2, 0).unwrap();
        assert!(orthogonalization_time(&h, &psi0, 0.0, 64).is_err());
        assert!(orthogonalization_time(&h, &psi0, 1e-2, 64).is_err());
    }

    #[test]
    fn saturation_witness() {
        let e0 = 3.0e7;
        let h = ComplexMatrix::from_real_diagonal(&[0.0, 2.0 * e0]);
        let plus = StateVector::from_real(&[1.0, 1.0]).unwrap();
        let traj = HamiltonianTrajectory::constant(h.clone(), 1.7 * PI / (2.0 * e0)).unwrap();
        let t = orthogonalization_time(&traj, &plus, 1e-12, 256)
            .unwrap()
            .time()
            .unwrap();
        let exact = PI / (2.0 * e0);
        assert!((t - exact).abs() < 1e-9 * exact);
        let bounds = QslBounds::time_independent(&h, &plus, false).unwrap();
        assert!((bounds.t_mt - exact).abs() < 1e-12 * exact);
        assert!((bounds.t_ml.unwrap() - exact).abs() < 1e-12 * exact);
        assert_eq!(bounds.t_effective, bounds.t_mt.max(bounds.t_ml.unwrap()));
    }

    #[test]
    fn ml_withheld_without_ground_zero() {
        let h = ComplexMatrix::pauli_z();
        let plus = StateVector::from_real(&[1.0, 1.0]).unwrap();
        let b = QslBounds::time_independent(&h, &plus, false).unwrap();
        assert!(b.t_ml.is_none());
        assert_eq!(b.t_effective, b.t_mt);
        let b = QslBounds::time_independent(&h, &plus, true).unwrap();
        assert!((b.t_ml.unwrap() - PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn trajectory_bounds_attach_ml_to_effective_hamiltonian() {
        let omega = 1e8;
        let traj = rabi(omega, PI / omega).shift_ground_to_zero(4).unwrap();
        let psi0 = StateVector::basis(2, 0).unwrap();
        let stats = time_averaged_stats(&traj, &psi0, 64).unwrap();
        let b = QslBounds::for_trajectory(&stats).unwrap();
        // π pulse: both bounds are saturated at the pulse length.
        assert!((b.t_mt - PI / omega).abs() < 1e-9 * PI / omega);
        assert!((b.t_ml.unwrap() - PI / omega).abs() < 1e-9 * PI / omega);
        let _ = Complex64::new(0.0, 0.0);
    }

    proptest! {
        #[test]
        fn invert_after_mt_is_identity(joules in 1e-30f64..1e-20) {
            let e = Energy::from_joules(joules);
            let (back, _) = invert_qsl(mt_bound(e).unwrap()).unwrap();
            prop_assert!((back.joules() - joules).abs() <= 1e-15 * joules);
        }

        #[test]
        fn corrected_bound_decreases_in_epsilon(a in 0.0f64..0.999, b in 0.0f64..0.999) {
            prop_assume!(a < b);
            let de = Energy::from_joules(5.2e-27);
            prop_assert!(corrected_mt_bound(de, a).unwrap() > corrected_mt_bound(de, b).unwrap());
        }
    }
}
