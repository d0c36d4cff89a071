//! Second-order Magnus and Dyson expansions and the leading-order formula for
//! the gap between the effective-Hamiltonian energy and the time-averaged
//! energy.
//!
//! All quadratures run over the same midpoint-sampled step Hamiltonians the
//! propagator uses. On that piecewise-constant Hamiltonian the ordered double
//! integrals reduce to exact finite sums: the cross-step part of the triangle
//! is Σ_{j>k} Δt² f(H_j, H_k), and the within-step part contributes Δt²/2
//! times the diagonal term (which vanishes for commutators).

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::{
    eigh, expectation, midpoint_hamiltonians, propagate, ComplexMatrix, HamiltonianTrajectory,
    StateVector,
};
use crate::error::{Error, Result};
use crate::qsl::stats_from_propagation;
use crate::units::Energy;

/// Smallest step count accepted by the expansion routines.
pub const MIN_EXPANSION_STEPS: usize = 32;

/// Values below this multiple of the energy scale are treated as rounding noise.
pub const PRECISION_FLOOR: f64 = 1e-14;

/// Rounding in the N-step propagator product leaves an absolute eigenphase
/// error of order N·ε_mach, i.e. an energy error of N·ε_mach/τ; values below
/// this multiple of it are excluded from exponent fits.
pub const ROUNDING_FLOOR_FACTOR: f64 = 16.0;

fn check_steps(steps: usize) -> Result<()> {
    if steps < MIN_EXPANSION_STEPS {
        return Err(Error::InvalidArgument(format!(
            "expansion needs at least {MIN_EXPANSION_STEPS} steps, got {steps}"
        )));
    }
    Ok(())
}

/// H_eff truncated after the second Magnus term:
/// (1/τ)∫H dt + (1/2iτ)∫∫_{t₂<t₁}[H(t₁), H(t₂)].
pub fn magnus_h_eff_second_order(h: &HamiltonianTrajectory, steps: usize) -> Result<ComplexMatrix> {
    let (first, second) = magnus_terms(h, steps)?;
    Ok((&first + &second).hermitian_part())
}

/// The second Magnus term alone, (1/2iτ)∫∫_{t₂<t₁}[H(t₁), H(t₂)].
pub fn magnus_second_order_term(h: &HamiltonianTrajectory, steps: usize) -> Result<ComplexMatrix> {
    Ok(magnus_terms(h, steps)?.1.hermitian_part())
}

fn magnus_terms(h: &HamiltonianTrajectory, steps: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    check_steps(steps)?;
    let hs = midpoint_hamiltonians(h, steps)?;
    let tau = h.duration();
    let dt = tau / steps as f64;
    let dim = h.dim();
    let mut first = ComplexMatrix::zeros(dim);
    let mut commutators = ComplexMatrix::zeros(dim);
    let mut earlier = ComplexMatrix::zeros(dim);
    for hj in &hs {
        commutators = &commutators + &hj.commutator(&earlier).scale(dt);
        earlier = &earlier + &hj.scale(dt);
        first = &first + hj;
    }
    let first = first.scale(1.0 / steps as f64);
    let second = commutators.scale_complex(Complex64::new(0.0, -1.0 / (2.0 * tau)));
    Ok((first, second))
}

/// Truncated Dyson series and its unitarity defect ‖U†U − I‖_F.
#[derive(Debug, Clone)]
pub struct DysonExpansion {
    pub unitary: ComplexMatrix,
    pub unitarity_defect: f64,
}

/// U(t) ≈ I − i∫H + (−i)²∫∫_{t₂<t₁}H(t₁)H(t₂) on [0, t].
pub fn dyson_unitary_second_order(
    h: &HamiltonianTrajectory,
    t: f64,
    steps: usize,
) -> Result<DysonExpansion> {
    if !(t > 0.0 && t <= h.duration()) {
        return Err(Error::InvalidDuration(t));
    }
    check_steps(steps)?;
    let window = if t < h.duration() { h.restricted(t)? } else { h.clone() };
    let hs = midpoint_hamiltonians(&window, steps)?;
    let dt = t / steps as f64;
    let dim = h.dim();
    let mut first = ComplexMatrix::zeros(dim);
    let mut second = ComplexMatrix::zeros(dim);
    for hj in &hs {
        // Cross-step pairs with all earlier steps, plus the half-square of the
        // within-step triangle.
        let within = hj.scale(0.5 * dt * dt);
        second = &second + &(hj * &(&first.scale(dt * dt) + &within));
        first = &first + hj;
    }
    let minus_i = Complex64::new(0.0, -1.0);
    let u = &(&ComplexMatrix::identity(dim) + &first.scale_complex(minus_i * dt)) - &second;
    let unitarity_defect = u.unitarity_defect();
    Ok(DysonExpansion {
        unitary: u,
        unitarity_defect,
    })
}

/// Σ_j Δt·Im⟨H_jψ₀|K_jψ₀⟩ with K_j = Σ_{k<j} Δt H_k, i.e. the ordered double
/// integral of ⟨ψ₀|[H(t₁), H(t₂)]|ψ₀⟩ divided by 2i.
fn half_commutator_integral(hs: &[ComplexMatrix], psi0: &StateVector, dt: f64) -> f64 {
    let v = psi0.as_nalgebra();
    let mut k_psi = v.map(|_| Complex64::new(0.0, 0.0));
    let mut total = 0.0;
    for hj in hs {
        let h_psi = hj.as_nalgebra() * v;
        total += dt * h_psi.dotc(&k_psi).im;
        k_psi += h_psi * Complex64::new(dt, 0.0);
    }
    total
}

/// Leading-order prediction of E_eff − E, with sign.
pub fn energy_difference_signed(
    h: &HamiltonianTrajectory,
    psi0: &StateVector,
    steps: usize,
) -> Result<Energy> {
    check_steps(steps)?;
    if psi0.dim() != h.dim() {
        return Err(Error::DimensionError {
            expected: h.dim(),
            got: psi0.dim(),
        });
    }
    let hs = midpoint_hamiltonians(h, steps)?;
    let dt = h.duration() / steps as f64;
    // (i/2τ)·∫∫⟨[H₁,H₂]⟩ = (i/2τ)·2i·S = −S/τ
    let s = half_commutator_integral(&hs, psi0, dt);
    Ok(Energy::from_angular_frequency(-s / h.duration()))
}

/// (1/2τ)|∫∫_{t₂<t₁}⟨ψ₀|[H(t₁), H(t₂)]|ψ₀⟩ dt₁dt₂|.
pub fn energy_difference_formula(
    h: &HamiltonianTrajectory,
    psi0: &StateVector,
    steps: usize,
) -> Result<Energy> {
    Ok(energy_difference_signed(h, psi0, steps)?.abs())
}

/// One coupling strength of a scaling sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingPoint {
    pub lambda: f64,
    pub e_eff: Energy,
    pub e_avg: Energy,
    /// ⟨ψ₀|H_eff^(2)|ψ₀⟩ from the truncated Magnus series.
    pub e_magnus: Energy,
    /// Signed leading-order prediction of E_eff − E.
    pub formula: Energy,
    /// ‖λH‖, the largest instantaneous |eigenvalue|.
    pub energy_scale: Energy,
    /// Values below this are indistinguishable from rounding.
    pub noise_floor: Energy,
}

impl ScalingPoint {
    pub fn difference(&self) -> f64 {
        (self.e_eff - self.e_avg).angular_frequency()
    }

    pub fn residual(&self) -> f64 {
        self.difference() - self.formula.angular_frequency()
    }

    pub fn magnus_residual(&self) -> f64 {
        (self.e_eff - self.e_magnus).angular_frequency()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Fitted(f64),
    /// Too few points rose above the rounding floor to fit a slope.
    SaturatedByPrecision,
}

impl Exponent {
    pub fn value(self) -> Option<f64> {
        match self {
            Exponent::Fitted(p) => Some(p),
            Exponent::SaturatedByPrecision => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExpansionReport {
    /// Quantities at the largest λ.
    pub e_eff_exact: Energy,
    pub e_avg_exact: Energy,
    pub first_order_term: Energy,
    pub second_order_commutator_term: Energy,
    /// Exponent p in |E_eff − E| ∝ λ^p.
    pub lambda_scaling_exponent: Exponent,
    /// Exponent of |E_eff − E − formula|.
    pub residual_exponent: Exponent,
    /// Exponent of |E_eff − ⟨H_eff^(2)⟩|.
    pub magnus_exponent: Exponent,
    /// |E_eff − E|/λ² at the smallest λ.
    pub quadratic_coefficient: f64,
    /// |formula|/λ², independent of λ.
    pub formula_coefficient: f64,
    pub points: Vec<ScalingPoint>,
}

impl ExpansionReport {
    /// Relative mismatch of the measured and predicted λ² coefficients.
    pub fn coefficient_mismatch(&self) -> f64 {
        if self.formula_coefficient == 0.0 {
            return if self.quadratic_coefficient == 0.0 { 0.0 } else { f64::INFINITY };
        }
        (self.quadratic_coefficient - self.formula_coefficient).abs() / self.formula_coefficient
    }
}

/// Default λ grid: 11 points, five per decade, from 1e-2 down to 1e-4.
pub fn default_lambdas() -> Vec<f64> {
    (0..=10).map(|k| 10f64.powf(-2.0 - 0.2 * k as f64)).collect()
}

/// Evaluates exact and expanded energies along λ·H for each λ and fits the
/// power laws of the second-order gap and its residuals.
pub fn verify_second_order_scaling(
    h: &HamiltonianTrajectory,
    psi0: &StateVector,
    lambdas: &[f64],
    steps: usize,
) -> Result<ExpansionReport> {
    check_steps(steps)?;
    if lambdas.len() < 2 {
        return Err(Error::InvalidArgument("need at least two λ values".into()));
    }
    if lambdas.iter().any(|&l| !(l > 0.0 && l <= 1.0)) {
        return Err(Error::InvalidArgument("λ values must lie in (0, 1]".into()));
    }
    if lambdas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("λ values must be strictly decreasing".into()));
    }
    let hs = midpoint_hamiltonians(h, steps)?;
    let mut unit_scale: f64 = 0.0;
    for m in &hs {
        let (values, _) = eigh(m)?;
        unit_scale = unit_scale.max(values[0].abs()).max(values[values.len() - 1].abs());
    }

    let points: Vec<ScalingPoint> = lambdas
        .par_iter()
        .map(|&lambda| scaling_point(h, psi0, lambda, steps, unit_scale))
        .collect::<Result<_>>()?;

    let first = points[0];
    let h_bar = {
        let scaled = h.scaled(first.lambda);
        let hs = midpoint_hamiltonians(&scaled, steps)?;
        let mut sum = ComplexMatrix::zeros(h.dim());
        for m in &hs {
            sum = &sum + m;
        }
        expectation(psi0, &sum.scale(1.0 / steps as f64))?
    };

    let smallest = *points.last().expect("at least two points");
    let fit = |f: &dyn Fn(&ScalingPoint) -> f64| fit_exponent(&points, f);
    let formula_coefficient = smallest.formula.angular_frequency().abs() / smallest.lambda.powi(2);
    Ok(ExpansionReport {
        e_eff_exact: first.e_eff,
        e_avg_exact: first.e_avg,
        first_order_term: Energy::from_angular_frequency(h_bar),
        second_order_commutator_term: first.formula.abs(),
        lambda_scaling_exponent: fit(&|p| p.difference()),
        residual_exponent: fit(&|p| p.residual()),
        magnus_exponent: fit(&|p| p.magnus_residual()),
        quadratic_coefficient: smallest.difference().abs() / smallest.lambda.powi(2),
        formula_coefficient,
        points,
    })
}

fn scaling_point(
    h: &HamiltonianTrajectory,
    psi0: &StateVector,
    lambda: f64,
    steps: usize,
    unit_scale: f64,
) -> Result<ScalingPoint> {
    let scaled = h.scaled(lambda);
    let prop = propagate(&scaled, psi0, steps)?;
    let stats = stats_from_propagation(&prop, psi0)?;
    let magnus = magnus_h_eff_second_order(&scaled, steps)?;
    Ok(ScalingPoint {
        lambda,
        e_eff: stats.effective_energy,
        e_avg: stats.mean_energy,
        e_magnus: Energy::from_angular_frequency(expectation(psi0, &magnus)?),
        formula: energy_difference_signed(&scaled, psi0, steps)?,
        energy_scale: Energy::from_angular_frequency(lambda * unit_scale),
        noise_floor: Energy::from_angular_frequency(
            (PRECISION_FLOOR * lambda * unit_scale)
                .max(ROUNDING_FLOOR_FACTOR * steps as f64 * f64::EPSILON / h.duration()),
        ),
    })
}

/// Least-squares slope of log|f| against log λ over the points above the
/// noise floor.
fn fit_exponent(points: &[ScalingPoint], f: &dyn Fn(&ScalingPoint) -> f64) -> Exponent {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter_map(|p| {
            let y = f(p).abs();
            (y > p.noise_floor.angular_frequency())
                .then(|| (p.lambda.ln(), y.ln()))
        })
        .collect();
    if usable.len() < 3 {
        return Exponent::SaturatedByPrecision;
    }
    let n = usable.len() as f64;
    let mx = usable.iter().map(|u| u.0).sum::<f64>() / n;
    let my = usable.iter().map(|u| u.1).sum::<f64>() / n;
    let sxy: f64 = usable.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = usable.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    Exponent::Fitted(sxy / sxx)
}
