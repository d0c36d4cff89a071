//! Randomized invariant suites for the speed-limit inequalities, the
//! second-order energy gap, and the finite-fidelity correction.
//!
//! Each trial draws from its own ChaCha stream (seed, trial index), so a
//! report depends only on the seed and the trial count, not on scheduling.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::dynamics::{
    eigh, expectation, orthogonalizing_state, propagate, propagate_unitary, unitary_eigen,
    variance, ComplexMatrix, HamiltonianTrajectory, Smoothness, StateVector,
};
use crate::error::{Error, Result};
use crate::magnus::{default_lambdas, magnus_second_order_term, verify_second_order_scaling};
use crate::qsl::{
    corrected_mt_bound, mt_bound, orthogonalization_time, overlap_crossing_time,
    time_averaged_stats, Orthogonalization, DEFAULT_ORTHOGONALITY_TOL,
};
use crate::units::Energy;

/// Relative slack granted to the speed-limit inequalities.
pub const QSL_SLACK: f64 = 1e-6;

pub const DEFAULT_STEPS: usize = 512;

/// Fewer steps keep the rounding floor of the scaling fits low.
pub const MAGNUS_STEPS: usize = 128;

/// Per-trial random stream.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Hermitian matrix with Gaussian entries, normalized by √dim.
pub fn random_hermitian(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    let raw = ComplexMatrix::from_fn(dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    (&raw + &raw.dagger()).scale(0.5 / (dim as f64).sqrt())
}

/// Haar-like random pure state.
pub fn random_state(rng: &mut impl Rng, dim: usize) -> StateVector {
    let amps = (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    StateVector::normalized(amps).expect("a Gaussian vector is nonzero")
}

/// Σ_k B_{k,n}(t/T)·M_k with random Hermitian control matrices M_k and the
/// Bernstein basis of degree `degree`.
pub fn random_smooth_trajectory(
    rng: &mut impl Rng,
    dim: usize,
    duration: f64,
    degree: usize,
) -> Result<HamiltonianTrajectory> {
    let controls: Vec<ComplexMatrix> = (0..=degree).map(|_| random_hermitian(rng, dim)).collect();
    HamiltonianTrajectory::new(dim, duration, Smoothness::Smooth, move |t| {
        let s = (t / duration).clamp(0.0, 1.0);
        let mut acc = ComplexMatrix::zeros(dim);
        for (k, m) in controls.iter().enumerate() {
            let b = binomial(degree, k) * s.powi(k as i32) * (1.0 - s).powi((degree - k) as i32);
            acc = &acc + &m.scale(b);
        }
        acc
    })
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// V·diag(a_k + b_k·sin(ω_k t + φ_k))·V† for a fixed random eigenbasis V, so
/// that all instantaneous Hamiltonians commute.
pub fn random_commuting_trajectory(
    rng: &mut impl Rng,
    dim: usize,
    duration: f64,
) -> Result<HamiltonianTrajectory> {
    let (_, basis) = eigh(&random_hermitian(rng, dim))?;
    let params: Vec<[f64; 4]> = (0..dim)
        .map(|_| {
            [
                rng.random_range(-1.0..1.0),
                rng.random_range(0.1..1.0),
                rng.random_range(1.0..6.0),
                rng.random_range(0.0..TAU),
            ]
        })
        .collect();
    HamiltonianTrajectory::new(dim, duration, Smoothness::Smooth, move |t| {
        let diag: Vec<f64> = params
            .iter()
            .map(|[a, b, w, p]| a + b * (w * t / duration + p).sin())
            .collect();
        &(&basis * &ComplexMatrix::from_real_diagonal(&diag)) * &basis.dagger()
    })
}

/// Length of the shortest arc of the unit circle holding every eigenvalue.
pub fn eigenphase_arc(u: &ComplexMatrix) -> Result<f64> {
    let (values, _) = unitary_eigen(u)?;
    let mut phases: Vec<f64> = values.iter().map(|z| z.arg().rem_euclid(TAU)).collect();
    phases.sort_by(f64::total_cmp);
    let wrap_gap = TAU - (phases[phases.len() - 1] - phases[0]);
    let largest_gap = phases
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(wrap_gap, f64::max);
    Ok(TAU - largest_gap)
}

/// A trajectory together with a state that is exactly orthogonal to its
/// evolved self at the final time.
#[derive(Debug, Clone)]
pub struct OrthogonalizingInstance {
    pub trajectory: HamiltonianTrajectory,
    pub psi0: StateVector,
    /// |⟨ψ₀|U(T)|ψ₀⟩| at the construction time T.
    pub final_overlap: f64,
}

/// Cuts `base` at the first time T where the eigenphase arc of U(T) reaches
/// π, then takes ψ₀ as the balanced superposition of the two extreme
/// eigenvectors. With `overshoot = Some(f)` and dim ≥ 3 the cut moves to
/// T·(1 + f) when the origin then lies inside the eigenvalue hull, which
/// produces states spread over several eigenvectors.
///
/// T is refined on the discretization that is later used to evolve the
/// instance, so the final overlap sits at rounding level.
pub fn orthogonalizing_instance(
    base: &HamiltonianTrajectory,
    steps: usize,
    overshoot: Option<f64>,
) -> Result<Option<OrthogonalizingInstance>> {
    let reference = StateVector::basis(base.dim(), 0)?;
    let prop = propagate(base, &reference, steps)?;
    // In two dimensions the arc never exceeds π, so the crossing is tracked
    // through cos(δ/2) = Re(tr U · conj √det U)/2 with √det continued along
    // the grid; it changes sign where the two eigenvalues become opposite.
    let two_level = base.dim() == 2;
    let mut root_branch = Complex64::new(1.0, 0.0);
    let mut first = None;
    for (k, u) in prop.unitaries.iter().enumerate().skip(1) {
        let crossed = if two_level {
            root_branch = continued_sqrt_det(u, root_branch);
            half_angle_cosine(u, root_branch) <= 0.0
        } else {
            eigenphase_arc(u)? >= PI
        };
        if crossed {
            first = Some(k);
            break;
        }
    }
    let Some(k) = first else { return Ok(None) };
    let branch_before = if two_level {
        continued_sqrt_det(&prop.unitaries[k - 1], root_branch)
    } else {
        root_branch
    };

    let arc_excess = |t: f64| -> Result<f64> {
        let u = propagate_unitary(&base.restricted(t)?, steps)?;
        if two_level {
            Ok(-half_angle_cosine(&u, continued_sqrt_det(&u, branch_before)))
        } else {
            Ok(eigenphase_arc(&u)? - PI)
        }
    };
    let mut a = prop.times[k - 1].max(prop.times[k] * 1e-3);
    let mut b = prop.times[k];
    let (mut fa, mut fb) = (arc_excess(a)?, arc_excess(b)?);
    for _ in 0..40 {
        if fa < 0.0 {
            break;
        }
        a = (a - prop.step_size()).max(0.5 * a);
        fa = arc_excess(a)?;
    }
    for _ in 0..40 {
        if fb >= 0.0 || b >= base.duration() {
            break;
        }
        b = (b + prop.step_size()).min(base.duration());
        fb = arc_excess(b)?;
    }
    if !(fa < 0.0 && fb >= 0.0) {
        return Ok(None);
    }
    let t_star = illinois_root(&arc_excess, (a, fa), (b, fb), 1e-15)?;

    if let (Some(f), true) = (overshoot, base.dim() >= 3) {
        let t = t_star * (1.0 + f);
        if t <= base.duration() {
            let trajectory = base.restricted(t)?;
            let u = propagate_unitary(&trajectory, steps)?;
            if let Some((psi0, ov)) = orthogonalizing_state(&u, 1e-12)? {
                return Ok(Some(OrthogonalizingInstance {
                    trajectory,
                    psi0,
                    final_overlap: ov,
                }));
            }
        }
    }
    let trajectory = base.restricted(t_star)?;
    let u = propagate_unitary(&trajectory, steps)?;
    Ok(orthogonalizing_state(&u, 1e-9)?.map(|(psi0, ov)| OrthogonalizingInstance {
        trajectory,
        psi0,
        final_overlap: ov,
    }))
}

/// √det U on the branch nearest to `previous`.
fn continued_sqrt_det(u: &ComplexMatrix, previous: Complex64) -> Complex64 {
    let d = u.as_nalgebra();
    let root = (d[(0, 0)] * d[(1, 1)] - d[(0, 1)] * d[(1, 0)]).sqrt();
    if (root - previous).norm() <= (root + previous).norm() {
        root
    } else {
        -root
    }
}

fn half_angle_cosine(u: &ComplexMatrix, sqrt_det: Complex64) -> f64 {
    (u.trace() * sqrt_det.conj()).re / 2.0
}

/// Regula falsi with the Illinois modification on a sign-changing bracket.
fn illinois_root(
    f: &impl Fn(f64) -> Result<f64>,
    (mut a, mut fa): (f64, f64),
    (mut b, mut fb): (f64, f64),
    rel_tol: f64,
) -> Result<f64> {
    let mut side = 0i8;
    for _ in 0..200 {
        let c = (a * fb - b * fa) / (fb - fa);
        let fc = f(c)?;
        if fc == 0.0 || (b - a).abs() <= rel_tol * b.abs() {
            return Ok(c);
        }
        if (fc < 0.0) == (fa < 0.0) {
            a = c;
            fa = fc;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = c;
            fb = fc;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
        if fc.abs() < 1e-15 {
            return Ok(c);
        }
    }
    Ok(if fa.abs() < fb.abs() { a } else { b })
}

/// Random smooth instance of dimension `dim`, retrying with stronger drives
/// until the eigenphase arc reaches π inside the horizon.
pub fn random_orthogonalizing_instance(
    rng: &mut impl Rng,
    dim: usize,
    steps: usize,
    overshoot: Option<f64>,
) -> Result<OrthogonalizingInstance> {
    for attempt in 0..12 {
        let base = random_smooth_trajectory(rng, dim, 1.0, 3)?;
        let spread = crate::dynamics::spectral_spread(&base.evaluate(0.5))?;
        // Aim the first crossing near the middle of the horizon.
        let target = TAU * rng.random_range(0.8..1.6) * (1.0 + attempt as f64 * 0.5);
        let base = base.scaled(target / spread.max(1e-3));
        if let Some(inst) = orthogonalizing_instance(&base, steps, overshoot)? {
            return Ok(inst);
        }
    }
    Err(Error::InvalidArgument(format!(
        "no orthogonalizing instance found in dimension {dim}"
    )))
}

/// One named inequality checked over many trials. `worst_margin ≥ 0` means
/// every trial passed; the margin is normalized per check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckSummary {
    pub name: String,
    pub trials: usize,
    pub violations: usize,
    pub worst_margin: f64,
}

impl CheckSummary {
    fn from_margins(name: &str, margins: &[f64]) -> Self {
        Self {
            name: name.to_string(),
            trials: margins.len(),
            violations: margins.iter().filter(|m| !(**m >= 0.0)).count(),
            worst_margin: margins.iter().copied().fold(f64::INFINITY, |a, b| {
                if b.is_nan() { f64::NEG_INFINITY } else { a.min(b) }
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<CheckSummary>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.violations == 0 && c.trials > 0)
    }

    pub fn violations(&self) -> usize {
        self.checks.iter().map(|c| c.violations).sum()
    }

    pub fn render(&self) -> String {
        let mut out = format!("suite {} (seed {})\n", self.suite, self.seed);
        for c in &self.checks {
            let _ = writeln!(
                out,
                "  {:<40} trials {:>5}  violations {:>3}  worst margin {:+.3e}",
                c.name, c.trials, c.violations, c.worst_margin
            );
        }
        let _ = writeln!(out, "{}", if self.passed() { "PASS" } else { "FAIL" });
        out
    }
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    Ok(())
}

/// Per-trial outcome of the speed-limit suite.
#[derive(Debug, Clone, Copy)]
pub struct QslTrial {
    pub dim: usize,
    /// t⊥·ΔE/(π/2) − 1 on a time-dependent instance; None if never reached.
    pub mt_margin: Option<f64>,
    /// t⊥·E/(π/2) − 1 on a constant, ground-zero Hamiltonian.
    pub ml_margin: Option<f64>,
    /// t⊥·ΔE/(π/2) − 1 on the same constant Hamiltonian.
    pub mt_constant_margin: Option<f64>,
}

pub const QSL_DIMS: [usize; 3] = [2, 4, 8];

pub fn qsl_trial(seed: u64, trial: usize, steps: usize) -> Result<QslTrial> {
    let mut rng = trial_rng(seed, trial);
    let dim = QSL_DIMS[trial % QSL_DIMS.len()];

    let overshoot = (trial % 2 == 1).then(|| rng.random_range(0.05..0.4));
    let inst = random_orthogonalizing_instance(&mut rng, dim, steps, overshoot)?;
    let mt_margin = match orthogonalization_time(
        &inst.trajectory,
        &inst.psi0,
        DEFAULT_ORTHOGONALITY_TOL,
        steps,
    )? {
        Orthogonalization::Reached { time, .. } => {
            let stats = time_averaged_stats(&inst.trajectory.restricted(time)?, &inst.psi0, steps)?;
            Some(time * stats.energy_stddev.angular_frequency() / FRAC_PI_2 - 1.0)
        }
        Orthogonalization::NotReached { .. } => None,
    };

    // Constant Hamiltonian with ground energy zero; ψ₀ mixes two levels with
    // a random relative phase and orthogonalizes at π/(E_j − E_i).
    let h = random_hermitian(&mut rng, dim);
    let (values, vectors) = eigh(&h)?;
    let h = &h - &ComplexMatrix::identity(dim).scale(values[0]);
    let levels: Vec<f64> = values.iter().map(|v| v - values[0]).collect();
    let i = rng.random_range(0..dim - 1);
    let j = rng.random_range(i + 1..dim);
    let gap = levels[j] - levels[i];
    let phase = Complex64::from_polar(1.0, rng.random_range(0.0..TAU));
    let amps = (0..dim)
        .map(|r| (vectors.get(r, i) + vectors.get(r, j) * phase) * std::f64::consts::FRAC_1_SQRT_2)
        .collect();
    let psi0 = StateVector::normalized(amps)?;
    let constant = HamiltonianTrajectory::constant(h.clone(), 1.25 * PI / gap)?;
    let (ml_margin, mt_constant_margin) =
        match orthogonalization_time(&constant, &psi0, DEFAULT_ORTHOGONALITY_TOL, steps)? {
            Orthogonalization::Reached { time, .. } => {
                let e = expectation(&psi0, &h)?;
                let de = variance(&psi0, &h)?.sqrt();
                (
                    Some(time * e / FRAC_PI_2 - 1.0),
                    Some(time * de / FRAC_PI_2 - 1.0),
                )
            }
            Orthogonalization::NotReached { .. } => (None, None),
        };
    Ok(QslTrial {
        dim,
        mt_margin,
        ml_margin,
        mt_constant_margin,
    })
}

/// Margins are rescaled so that the allowed slack maps to zero.
fn slack_margin(m: Option<f64>) -> f64 {
    m.map_or(f64::NEG_INFINITY, |m| (m + QSL_SLACK) / QSL_SLACK)
}

pub fn qsl_suite(trials: usize, seed: u64, steps: usize) -> Result<SuiteReport> {
    check_trials(trials)?;
    let outcomes: Vec<QslTrial> = (0..trials)
        .into_par_iter()
        .map(|t| qsl_trial(seed, t, steps))
        .collect::<Result<_>>()?;
    let mut checks = Vec::new();
    for dim in QSL_DIMS {
        let of_dim: Vec<&QslTrial> = outcomes.iter().filter(|o| o.dim == dim).collect();
        if of_dim.is_empty() {
            continue;
        }
        let mt: Vec<f64> = of_dim.iter().map(|o| slack_margin(o.mt_margin)).collect();
        checks.push(CheckSummary::from_margins(
            &format!("t_perp*dE >= pi/2, time-dependent, d={dim}"),
            &mt,
        ));
    }
    let ml: Vec<f64> = outcomes.iter().map(|o| slack_margin(o.ml_margin)).collect();
    checks.push(CheckSummary::from_margins("t_perp*E >= pi/2, constant ground-zero", &ml));
    let mtc: Vec<f64> = outcomes.iter().map(|o| slack_margin(o.mt_constant_margin)).collect();
    checks.push(CheckSummary::from_margins("t_perp*dE >= pi/2, constant", &mtc));
    Ok(SuiteReport {
        suite: "qsl".into(),
        seed,
        checks,
    })
}

/// Acceptance bands for the scaling suite.
pub const GAP_EXPONENT: (f64, f64) = (2.0, 0.1);
pub const RESIDUAL_EXPONENT: (f64, f64) = (3.0, 0.2);
pub const COEFFICIENT_TOL: f64 = 0.05;
pub const COMMUTING_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub struct MagnusTrial {
    pub gap_exponent: Option<f64>,
    pub residual_exponent: Option<f64>,
    pub coefficient_mismatch: f64,
    /// |E_eff − E|/‖H‖ on a commuting trajectory.
    pub commuting_gap: f64,
}

/// Largest |eigenvalue| over the integrator's step Hamiltonians.
fn operator_norm(h: &HamiltonianTrajectory, steps: usize) -> Result<f64> {
    let mut norm: f64 = 0.0;
    for m in crate::dynamics::midpoint_hamiltonians(h, steps)? {
        let (values, _) = eigh(&m)?;
        norm = norm.max(values[0].abs()).max(values[values.len() - 1].abs());
    }
    Ok(norm)
}

/// Fraction of ‖M₂‖ that ⟨ψ₀|M₂|ψ₀⟩ must reach for ψ₀ to see the
/// second-order term; states below it sit near an accidental cancellation.
pub const GENERICITY_FRACTION: f64 = 0.2;

/// Random state whose expectation of `second_order` is not accidentally small.
fn generic_state(rng: &mut impl Rng, second_order: &ComplexMatrix) -> Result<StateVector> {
    let (values, _) = eigh(second_order)?;
    let norm = values[0].abs().max(values[values.len() - 1].abs());
    let mut psi = random_state(rng, second_order.dim());
    for _ in 0..1000 {
        if expectation(&psi, second_order)?.abs() >= GENERICITY_FRACTION * norm {
            break;
        }
        psi = random_state(rng, second_order.dim());
    }
    Ok(psi)
}

pub fn magnus_trial(seed: u64, trial: usize, steps: usize) -> Result<MagnusTrial> {
    let mut rng = trial_rng(seed, trial);
    let dim = [2, 4][trial % 2];
    let lambdas = default_lambdas();

    // A positive margin keeps every λ-scaled spectrum strictly inside the
    // nonnegative branch.
    let base = random_smooth_trajectory(&mut rng, dim, 1.0, 3)?;
    let lowest = base.min_instantaneous_eigenvalue(64)?;
    let base = base.shifted(1.0 - lowest);
    let psi0 = generic_state(&mut rng, &magnus_second_order_term(&base, steps)?)?;
    let report = verify_second_order_scaling(&base, &psi0, &lambdas, steps)?;

    let commuting = random_commuting_trajectory(&mut rng, dim, 1.0)?;
    let lowest = commuting.min_instantaneous_eigenvalue(64)?;
    let commuting = commuting.shifted(1.0 - lowest);
    let psi_c = random_state(&mut rng, dim);
    let norm = operator_norm(&commuting, steps)?;
    let flat = time_averaged_stats(&commuting, &psi_c, steps)?;
    let commuting_gap = (flat.effective_energy - flat.mean_energy).angular_frequency().abs() / norm;

    Ok(MagnusTrial {
        gap_exponent: report.lambda_scaling_exponent.value(),
        residual_exponent: report.residual_exponent.value(),
        coefficient_mismatch: report.coefficient_mismatch(),
        commuting_gap,
    })
}

pub fn magnus_suite(trials: usize, seed: u64, steps: usize) -> Result<SuiteReport> {
    check_trials(trials)?;
    let outcomes: Vec<MagnusTrial> = (0..trials)
        .into_par_iter()
        .map(|t| magnus_trial(seed, t, steps))
        .collect::<Result<_>>()?;
    let band = |v: Option<f64>, (centre, width): (f64, f64)| {
        v.map_or(f64::NEG_INFINITY, |v| 1.0 - (v - centre).abs() / width)
    };
    let gap: Vec<f64> = outcomes.iter().map(|o| band(o.gap_exponent, GAP_EXPONENT)).collect();
    let res: Vec<f64> = outcomes
        .iter()
        .map(|o| band(o.residual_exponent, RESIDUAL_EXPONENT))
        .collect();
    let coef: Vec<f64> = outcomes
        .iter()
        .map(|o| 1.0 - o.coefficient_mismatch / COEFFICIENT_TOL)
        .collect();
    let comm: Vec<f64> = outcomes
        .iter()
        .map(|o| 1.0 - o.commuting_gap / COMMUTING_TOL)
        .collect();
    Ok(SuiteReport {
        suite: "magnus".into(),
        seed,
        checks: vec![
            CheckSummary::from_margins("gap exponent in 2.0 +/- 0.1", &gap),
            CheckSummary::from_margins("residual exponent in 3.0 +/- 0.2", &res),
            CheckSummary::from_margins("lambda^2 coefficient within 5%", &coef),
            CheckSummary::from_margins("commuting gap <= 1e-12 |H|", &comm),
        ],
    })
}

pub const CORRECTION_EPSILONS: [f64; 3] = [1e-4, 1e-3, 1e-2];

/// |ratio − (1 − 2√ε/π)| normalized by ε; ≤ 1 passes.
pub fn correction_expansion_error(delta_e: Energy, epsilon: f64) -> Result<f64> {
    let ratio = corrected_mt_bound(delta_e, epsilon)? / mt_bound(delta_e)?;
    Ok((ratio - (1.0 - 2.0 * epsilon.sqrt() / PI)).abs() / epsilon)
}

/// Smallest relative decrease of the corrected bound across an even grid of
/// `points` values of ε in [0, ε_max].
pub fn correction_monotonicity(delta_e: Energy, points: usize, eps_max: f64) -> Result<f64> {
    let values: Vec<f64> = (0..points)
        .map(|k| corrected_mt_bound(delta_e, eps_max * k as f64 / (points - 1) as f64))
        .collect::<Result<_>>()?;
    Ok(values
        .windows(2)
        .map(|w| (w[0] - w[1]) / w[0])
        .fold(f64::INFINITY, f64::min))
}

#[derive(Debug, Clone)]
pub struct CorrectionTrial {
    pub expansion_errors: Vec<f64>,
    pub monotone_step: f64,
    /// t_ε·ΔE/arccos(√ε) − 1 for each ε; None if the level was never reached.
    pub simulated_margins: Vec<Option<f64>>,
}

pub fn correction_trial(seed: u64, trial: usize, steps: usize) -> Result<CorrectionTrial> {
    let mut rng = trial_rng(seed, trial);
    let delta_e = Energy::from_joules(10f64.powf(rng.random_range(-30.0..-24.0)));
    let expansion_errors = CORRECTION_EPSILONS
        .iter()
        .map(|&e| correction_expansion_error(delta_e, e))
        .collect::<Result<_>>()?;
    let monotone_step = correction_monotonicity(delta_e, 1000, 0.5)?;

    let dim = [2, 4][trial % 2];
    let inst = random_orthogonalizing_instance(&mut rng, dim, steps, None)?;
    let mut simulated_margins = Vec::new();
    for eps in CORRECTION_EPSILONS {
        let level = eps.sqrt();
        let margin = match overlap_crossing_time(&inst.trajectory, &inst.psi0, level, steps)? {
            Orthogonalization::Reached { time, .. } => {
                let stats = time_averaged_stats(&inst.trajectory.restricted(time)?, &inst.psi0, steps)?;
                Some(time * stats.energy_stddev.angular_frequency() / level.acos() - 1.0)
            }
            Orthogonalization::NotReached { .. } => None,
        };
        simulated_margins.push(margin);
    }
    Ok(CorrectionTrial {
        expansion_errors,
        monotone_step,
        simulated_margins,
    })
}

pub fn error_correction_suite(trials: usize, seed: u64, steps: usize) -> Result<SuiteReport> {
    check_trials(trials)?;
    let outcomes: Vec<CorrectionTrial> = (0..trials)
        .into_par_iter()
        .map(|t| correction_trial(seed, t, steps))
        .collect::<Result<_>>()?;
    let mut checks = Vec::new();
    for (k, eps) in CORRECTION_EPSILONS.iter().enumerate() {
        let m: Vec<f64> = outcomes.iter().map(|o| 1.0 - o.expansion_errors[k]).collect();
        checks.push(CheckSummary::from_margins(
            &format!("|ratio - (1 - 2 sqrt(eps)/pi)| <= eps, eps={eps:e}"),
            &m,
        ));
    }
    let mono: Vec<f64> = outcomes.iter().map(|o| o.monotone_step).collect();
    checks.push(CheckSummary::from_margins("strictly decreasing on [0, 0.5]", &mono));
    for (k, eps) in CORRECTION_EPSILONS.iter().enumerate() {
        let m: Vec<f64> = outcomes
            .iter()
            .map(|o| slack_margin(o.simulated_margins[k]))
            .collect();
        checks.push(CheckSummary::from_margins(
            &format!("t_eps*dE >= arccos(sqrt(eps)), eps={eps:e}"),
            &m,
        ));
    }
    Ok(SuiteReport {
        suite: "error-correction".into(),
        seed,
        checks,
    })
}
