use num_complex::Complex64;

use crate::dynamics::functions::{expm_hermitian, raw_expectation, raw_variance};
use crate::dynamics::{ComplexMatrix, HamiltonianTrajectory, StateVector};
use crate::error::{Error, Result};

pub const MIN_STEPS: usize = 16;

/// Result of integrating the Schrödinger equation on a uniform grid.
///
/// Step `k` evolves under the constant Hamiltonian `step_hamiltonians[k]`
/// (H sampled at the step midpoint), so the stored states are the exact
/// evolution of that piecewise-constant Hamiltonian.
#[derive(Debug, Clone)]
pub struct Propagation {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    pub unitaries: Vec<ComplexMatrix>,
    pub step_hamiltonians: Vec<ComplexMatrix>,
}

impl Propagation {
    pub fn steps(&self) -> usize {
        self.step_hamiltonians.len()
    }

    pub fn step_size(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    pub fn duration(&self) -> f64 {
        *self.times.last().expect("non-empty grid")
    }

    pub fn final_unitary(&self) -> &ComplexMatrix {
        self.unitaries.last().expect("non-empty grid")
    }

    pub fn final_state(&self) -> &StateVector {
        self.states.last().expect("non-empty grid")
    }

    /// State at an arbitrary time, evolving from the preceding grid point
    /// under that step's Hamiltonian.
    pub fn state_at(&self, t: f64) -> Result<StateVector> {
        let total = self.duration();
        if !(0.0..=total).contains(&t) {
            return Err(Error::InvalidArgument(format!(
                "time {t} outside [0, {total}]"
            )));
        }
        let dt = self.step_size();
        let k = ((t / dt).floor() as usize).min(self.steps() - 1);
        let partial = t - self.times[k];
        if partial <= 0.0 {
            return Ok(self.states[k].clone());
        }
        let u = expm_hermitian(&self.step_hamiltonians[k], -partial)?;
        Ok(u.apply(&self.states[k]))
    }

    /// Per-step energy mean and standard deviation; both are conserved within
    /// a step because the step Hamiltonian is constant there.
    pub fn step_energy_stats(&self) -> Vec<(f64, f64)> {
        self.step_hamiltonians
            .iter()
            .zip(&self.states)
            .map(|(h, psi)| (raw_expectation(psi, h), raw_variance(psi, h).sqrt()))
            .collect()
    }

    /// max_k ‖U_k†U_k − I‖_F
    pub fn max_unitarity_defect(&self) -> f64 {
        self.unitaries
            .iter()
            .map(ComplexMatrix::unitarity_defect)
            .fold(0.0, f64::max)
    }
}

fn check_steps(steps: usize) -> Result<()> {
    if steps < MIN_STEPS {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_STEPS} steps, got {steps}"
        )));
    }
    Ok(())
}

/// Midpoint Hamiltonians H(t_k + Δt/2) for a uniform grid of `steps` steps.
pub fn midpoint_hamiltonians(h: &HamiltonianTrajectory, steps: usize) -> Result<Vec<ComplexMatrix>> {
    let dt = h.duration() / steps as f64;
    (0..steps)
        .map(|k| h.checked((k as f64 + 0.5) * dt))
        .collect()
}

/// Midpoint-exponential integrator U(t+Δt) = exp(−iΔt·H(t+Δt/2))·U(t).
pub fn propagate(h: &HamiltonianTrajectory, psi0: &StateVector, steps: usize) -> Result<Propagation> {
    check_steps(steps)?;
    if psi0.dim() != h.dim() {
        return Err(Error::DimensionError {
            expected: h.dim(),
            got: psi0.dim(),
        });
    }
    let dt = h.duration() / steps as f64;
    let step_hamiltonians = midpoint_hamiltonians(h, steps)?;

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut unitaries = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(psi0.clone());
    unitaries.push(ComplexMatrix::identity(h.dim()));

    for (k, hk) in step_hamiltonians.iter().enumerate() {
        let step = expm_hermitian(hk, -dt)?;
        let u = &step * unitaries.last().expect("seeded");
        states.push(u.apply(psi0));
        unitaries.push(u);
        times.push(if k + 1 == steps {
            h.duration()
        } else {
            (k + 1) as f64 * dt
        });
    }

    Ok(Propagation {
        times,
        states,
        unitaries,
        step_hamiltonians,
    })
}

/// Final propagator U(T) only.
pub fn propagate_unitary(h: &HamiltonianTrajectory, steps: usize) -> Result<ComplexMatrix> {
    check_steps(steps)?;
    let dt = h.duration() / steps as f64;
    let mut u = ComplexMatrix::identity(h.dim());
    for hk in midpoint_hamiltonians(h, steps)? {
        u = &expm_hermitian(&hk, -dt)? * &u;
    }
    Ok(u)
}

#[allow(dead_code)]
fn _assert_send_sync() {
    fn check<T: Send + Sync>() {}
    check::<Propagation>();
    check::<HamiltonianTrajectory>();
    check::<Complex64>();
}
