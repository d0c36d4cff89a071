//! Full gate-set estimation: amplification for every gate and qubit
//! choice, regression, τₙ and energies.

use qslprobe_blackbox::{gate_unitary, BlackboxError};

use crate::amplify::{run_amplification, AmplificationPlan, AmplificationRun};
use crate::backend::Backend;
use crate::energy::{energies, EnergyEstimate};
use crate::error::{EstimatorError, Result};
use crate::fit::{fit_run, GateTimeEstimate};
use crate::store::ExperimentStore;

#[derive(Debug, Clone, PartialEq)]
pub struct GateRequest {
    pub gate: String,
    /// Controls first, target last.
    pub qubits: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimationSettings {
    pub n_gate_values: Vec<u64>,
    pub n_shots: u64,
    pub seed: u64,
    pub threshold: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimation {
    pub runs: Vec<AmplificationRun>,
    pub estimates: Vec<GateTimeEstimate>,
    /// Requests that produced no estimate, with the reason.
    pub skipped: Vec<(String, String)>,
    pub energies: Vec<EnergyEstimate>,
}

/// Every ordered choice of distinct qubits for each gate.
pub fn all_qubit_choices(gates: &[String], n_qubits: usize) -> Result<Vec<GateRequest>> {
    let mut out = Vec::new();
    for gate in gates {
        let (_, arity) = gate_unitary(gate)?;
        let mut current = Vec::with_capacity(arity);
        choices(n_qubits, arity, &mut current, &mut |qs| {
            out.push(GateRequest { gate: gate.clone(), qubits: qs.to_vec() })
        });
    }
    Ok(out)
}

fn choices(n: usize, k: usize, current: &mut Vec<usize>, emit: &mut impl FnMut(&[usize])) {
    if current.len() == k {
        emit(current);
        return;
    }
    for q in 0..n {
        if !current.contains(&q) {
            current.push(q);
            choices(n, k, current, emit);
            current.pop();
        }
    }
}

pub fn estimate_gates(
    backend: &dyn Backend,
    requests: &[GateRequest],
    settings: &EstimationSettings,
    mut store: Option<&mut ExperimentStore>,
) -> Result<Estimation> {
    let mut runs = Vec::new();
    let mut estimates = Vec::new();
    let mut skipped = Vec::new();
    for (k, req) in requests.iter().enumerate() {
        let mut plan = AmplificationPlan::new(
            &req.gate,
            &req.qubits,
            settings.n_gate_values.clone(),
            settings.n_shots,
            settings.seed.wrapping_add(k as u64 * 1_000_003),
        );
        plan.threshold = settings.threshold;
        let label = plan.label();
        match run_amplification(backend, &plan, store.as_deref_mut()) {
            Ok(run) => {
                match fit_run(&run) {
                    Ok(e) => estimates.push(e),
                    Err(e) => skipped.push((label, e.to_string())),
                }
                runs.push(run);
            }
            Err(e @ EstimatorError::Backend(BlackboxError::NotConnected { .. }))
            | Err(e @ EstimatorError::InsufficientData { .. }) => skipped.push((label, e.to_string())),
            Err(e) => return Err(e),
        }
    }
    let energies = energies(&estimates);
    Ok(Estimation { runs, estimates, skipped, energies })
}
