//! τₙ selection and speed-limit energy estimates.

use std::f64::consts::FRAC_PI_2;

use qslprobe_core::Energy;

use crate::error::{EstimatorError, Result};
use crate::fit::GateTimeEstimate;

/// Smallest gate time among non-virtual estimates of arity `n`, over all
/// gates and qubit choices.
pub fn estimate_tau_n(estimates: &[GateTimeEstimate], n: usize) -> Result<f64> {
    fastest(estimates, n).map(|e| e.t_gate)
}

/// The estimate that attains τₙ.
pub fn fastest(estimates: &[GateTimeEstimate], n: usize) -> Result<&GateTimeEstimate> {
    estimates
        .iter()
        .filter(|e| e.arity == n && !e.is_virtual)
        .min_by(|a, b| a.t_gate.total_cmp(&b.t_gate))
        .ok_or(EstimatorError::NoPhysicalGate { arity: n })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyEstimate {
    pub arity: usize,
    pub tau_n: f64,
    /// Lower bound on the energy expectation (above the ground level).
    pub e_lower: Energy,
    /// Lower bound on the energy standard deviation.
    pub delta_e_lower: Energy,
    /// Range of the bound when τₙ moves by ± one standard error. The upper
    /// end is infinite when the error exceeds τₙ.
    pub band: Option<(Energy, Energy)>,
}

/// E ≥ ΔE ≥ πℏ/(2τₙ).
pub fn estimate_energy(tau_n: f64, n: usize) -> Result<EnergyEstimate> {
    if !(tau_n > 0.0 && tau_n.is_finite()) {
        return Err(EstimatorError::InvalidDuration(tau_n));
    }
    let e = Energy::from_angular_frequency(FRAC_PI_2 / tau_n);
    Ok(EnergyEstimate { arity: n, tau_n, e_lower: e, delta_e_lower: e, band: None })
}

impl EnergyEstimate {
    pub fn with_uncertainty(mut self, sigma: f64) -> Self {
        let low = Energy::from_angular_frequency(FRAC_PI_2 / (self.tau_n + sigma));
        let high = if self.tau_n > sigma {
            Energy::from_angular_frequency(FRAC_PI_2 / (self.tau_n - sigma))
        } else {
            Energy::from_angular_frequency(f64::INFINITY)
        };
        self.band = Some((low, high));
        self
    }
}

/// Energy estimates for every arity that has a physical gate, ascending.
pub fn energies(estimates: &[GateTimeEstimate]) -> Vec<EnergyEstimate> {
    let mut arities: Vec<usize> = estimates.iter().map(|e| e.arity).collect();
    arities.sort_unstable();
    arities.dedup();
    arities
        .into_iter()
        .filter_map(|n| {
            let f = fastest(estimates, n).ok()?;
            let e = estimate_energy(f.t_gate, n).ok()?;
            Some(e.with_uncertainty(f.t_gate_stderr))
        })
        .collect()
}
