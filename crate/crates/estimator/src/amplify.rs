//! Gate-time amplification experiments.

use rayon::prelude::*;

use qslprobe_blackbox::{Circuit, Job};

use crate::backend::Backend;
use crate::error::{EstimatorError, Result};
use crate::store::ExperimentStore;

/// Minimum number of plan values at or above the regression threshold.
pub const MIN_PLAN_POINTS: usize = 4;
/// Minimum number of successful points at or above the threshold.
pub const MIN_FIT_POINTS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct AmplificationPlan {
    pub gate: String,
    /// Controls first, target last.
    pub qubits: Vec<usize>,
    pub n_gate_values: Vec<u64>,
    pub n_shots: u64,
    pub seed: u64,
    /// Regression threshold; `None` picks [`default_threshold`].
    pub threshold: Option<u64>,
}

/// The lower median of `values`, lowered further if needed so that at
/// least [`MIN_PLAN_POINTS`] values lie at or above it.
pub fn default_threshold(values: &[u64]) -> Option<u64> {
    if values.len() < MIN_PLAN_POINTS {
        return None;
    }
    let lower_median = values[(values.len() - 1) / 2];
    Some(lower_median.min(values[values.len() - MIN_PLAN_POINTS]))
}

impl AmplificationPlan {
    pub fn new(gate: &str, qubits: &[usize], n_gate_values: Vec<u64>, n_shots: u64, seed: u64) -> Self {
        Self {
            gate: gate.to_string(),
            qubits: qubits.to_vec(),
            n_gate_values,
            n_shots,
            seed,
            threshold: None,
        }
    }

    pub fn with_threshold(mut self, threshold: u64) -> Self {
        self.threshold = Some(threshold);
        self
    }

    /// Gate and qubits as written in the experiment store, e.g. `CZ q0 q1`.
    pub fn label(&self) -> String {
        let qs: Vec<String> = self.qubits.iter().map(|q| format!("q{q}")).collect();
        format!("{} {}", self.gate, qs.join(" "))
    }

    pub fn threshold(&self) -> Result<u64> {
        self.threshold
            .or_else(|| default_threshold(&self.n_gate_values))
            .ok_or_else(|| EstimatorError::InvalidPlan(format!(
                "need at least {MIN_PLAN_POINTS} n_gate values"
            )))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(EstimatorError::InvalidPlan(m));
        if self.n_shots == 0 {
            return Err(EstimatorError::Backend(qslprobe_blackbox::BlackboxError::EmptyJob(
                "shots = 0".into(),
            )));
        }
        if self.qubits.is_empty() {
            return bad("no qubits".into());
        }
        if !self.n_gate_values.windows(2).all(|w| w[0] < w[1]) {
            return bad("n_gate values must be strictly ascending".into());
        }
        let threshold = self.threshold()?;
        let above = self.n_gate_values.iter().filter(|&&n| n >= threshold).count();
        if above < MIN_PLAN_POINTS {
            return bad(format!(
                "only {above} n_gate value(s) at or above threshold {threshold}; need {MIN_PLAN_POINTS}"
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmplificationRun {
    pub plan: AmplificationPlan,
    pub threshold: u64,
    /// (n_gate, t_exec) in plan order.
    pub points: Vec<(u64, f64)>,
    /// Points whose job failed, with the backend's message.
    pub failures: Vec<(u64, String)>,
}

/// Seed of the job for the `k`-th plan point.
fn point_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k as u64)
}

/// One single-circuit job per n_gate value. Raw points go to `store` (when
/// given) before the run is checked for enough data.
pub fn run_amplification(
    backend: &dyn Backend,
    plan: &AmplificationPlan,
    store: Option<&mut ExperimentStore>,
) -> Result<AmplificationRun> {
    plan.validate()?;
    let threshold = plan.threshold()?;
    let n_qubits = plan.qubits.iter().max().map_or(1, |m| m + 1);
    if n_qubits > backend.num_qubits() {
        return Err(qslprobe_blackbox::BlackboxError::TooManyQubits {
            requested: n_qubits,
            available: backend.num_qubits(),
        }
        .into());
    }
    // Fail fast on gate names the library does not know at all.
    Circuit::repeated(&plan.gate, &plan.qubits, 1)?;

    let outcomes: Vec<(u64, Result<f64>)> = plan
        .n_gate_values
        .par_iter()
        .enumerate()
        .map(|(k, &n)| {
            let result = Circuit::repeated(&plan.gate, &plan.qubits, n)
                .map_err(EstimatorError::from)
                .and_then(|c| {
                    let job = Job::new(vec![c], plan.n_shots).with_seed(point_seed(plan.seed, k));
                    backend.submit(&job)
                })
                .map(|r| r.t_exec());
            (n, result)
        })
        .collect();

    let mut points = Vec::new();
    let mut failures = Vec::new();
    let mut first_error = None;
    for (n, r) in outcomes {
        match r {
            Ok(t) => points.push((n, t)),
            Err(e) => {
                failures.push((n, e.to_string()));
                first_error.get_or_insert(e);
            }
        }
    }
    if let Some(store) = store {
        let label = plan.label();
        for &(n, t) in &points {
            store.append(&label, n, plan.n_shots, t)?;
        }
    }
    let usable = points.iter().filter(|(n, _)| *n >= threshold).count();
    if usable < MIN_FIT_POINTS {
        if let Some(e) = first_error {
            return Err(e);
        }
        return Err(EstimatorError::InsufficientData {
            points: usable,
            threshold,
            needed: MIN_FIT_POINTS,
        });
    }
    Ok(AmplificationRun { plan: plan.clone(), threshold, points, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use qslprobe_blackbox::{DeviceConfig, DeviceModel};

    fn quiet() -> DeviceModel {
        let mut cfg = DeviceConfig::default_device();
        cfg.overheads.jitter_stddev = 0.0;
        cfg.overheads.time_resolution = 0.0;
        DeviceModel::from_config(&cfg).unwrap()
    }

    #[test]
    fn default_thresholds() {
        let plan = [0, 100_000, 200_000, 300_000, 400_000, 500_000];
        assert_eq!(default_threshold(&plan), Some(200_000));
        assert_eq!(default_threshold(&[1, 2, 3, 4, 5]), Some(2));
        assert_eq!(default_threshold(&[1, 2, 3, 4, 5, 6, 7, 8, 9]), Some(5));
        assert_eq!(default_threshold(&[1, 2, 3]), None);
    }

    #[test]
    fn plan_validation() {
        let ok = AmplificationPlan::new("X", &[0], vec![0, 1, 2, 3, 4], 10, 0);
        assert!(ok.validate().is_ok());
        let unsorted = AmplificationPlan::new("X", &[0], vec![0, 2, 1, 3, 4], 10, 0);
        assert!(unsorted.validate().is_err());
        let high = ok.clone().with_threshold(3);
        assert!(matches!(high.validate(), Err(EstimatorError::InvalidPlan(_))));
        let no_shots = AmplificationPlan::new("X", &[0], vec![0, 1, 2, 3, 4], 0, 0);
        assert!(matches!(no_shots.validate(), Err(EstimatorError::Backend(_))));
    }

    #[test]
    fn zero_jitter_data_is_affine() {
        let d = quiet();
        let values = vec![100_000, 200_000, 300_000, 400_000, 500_000];
        let plan = AmplificationPlan::new("X", &[0], values, 1000, 1);
        let run = run_amplification(&d, &plan, None).unwrap();
        let (n0, t0) = run.points[0];
        for &(n, t) in &run.points[1..] {
            let slope = (t - t0) / (n - n0) as f64;
            assert!((slope - 3.2e-5).abs() < 1e-15, "{slope:e}");
        }
    }

    #[test]
    fn unknown_gate_and_unconnected_qubits() {
        let d = quiet();
        let plan = AmplificationPlan::new("W", &[0], vec![0, 1, 2, 3], 10, 0);
        assert!(matches!(
            run_amplification(&d, &plan, None),
            Err(EstimatorError::Backend(qslprobe_blackbox::BlackboxError::UnknownGate { .. }))
        ));
        let plan = AmplificationPlan::new("CZ", &[0, 2], vec![0, 1, 2, 3], 10, 0);
        assert!(matches!(
            run_amplification(&d, &plan, None),
            Err(EstimatorError::Backend(qslprobe_blackbox::BlackboxError::NotConnected { .. }))
        ));
    }

    #[test]
    fn points_are_persisted() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = ExperimentStore::open(dir.path().join("raw.csv")).unwrap();
        let plan = AmplificationPlan::new("CZ", &[1, 2], vec![0, 10, 20, 30], 100, 4);
        let run = run_amplification(&quiet(), &plan, Some(&mut store)).unwrap();
        let rows = crate::store::load_store(store.path()).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[2].gate, "CZ q1 q2");
        assert_eq!(rows[2].n_gate, 20);
        assert_eq!(rows[2].t_exec, run.points[2].1);
    }
}
