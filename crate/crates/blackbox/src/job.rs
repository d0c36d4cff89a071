//! Job submission: exact statevector simulation, shot sampling and the
//! hidden execution-time model.

use std::collections::BTreeMap;

use qslprobe_core::{ComplexMatrix, StateVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal};
use serde::Deserialize;

use crate::circuit::Circuit;
use crate::device::DeviceModel;
use crate::error::{BlackboxError, Result};
use crate::gates::embed;

#[derive(Debug, Clone, PartialEq)]
pub struct Job {
    pub circuits: Vec<Circuit>,
    pub shots: u64,
    pub seed: Option<u64>,
}

impl Job {
    pub fn new(circuits: Vec<Circuit>, shots: u64) -> Self {
        Self { circuits, shots, seed: None }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// What the user gets back: outcome counts per circuit and the total
/// execution time. Nothing else about the device is reachable from here.
#[derive(Debug, Clone, PartialEq)]
pub struct JobResult {
    counts: Vec<BTreeMap<String, u64>>,
    t_exec: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ResultRecord {
    t_exec_seconds: f64,
    #[serde(default)]
    circuit: Vec<BTreeMap<String, u64>>,
}

impl JobResult {
    pub fn new(counts: Vec<BTreeMap<String, u64>>, t_exec: f64) -> Result<Self> {
        if !(t_exec >= 0.0 && t_exec.is_finite()) {
            return Err(BlackboxError::ResultFormat(format!("t_exec = {t_exec} must be ≥ 0")));
        }
        Ok(Self { counts, t_exec })
    }

    /// Bitstring → count for each circuit. Qubit 0 is the leftmost digit.
    pub fn counts(&self) -> &[BTreeMap<String, u64>] {
        &self.counts
    }

    /// Total execution time in seconds.
    pub fn t_exec(&self) -> f64 {
        self.t_exec
    }

    /// TOML record; t_exec is written with 3 decimals.
    pub fn to_text(&self) -> String {
        let mut out = format!("t_exec_seconds = {:.3}\n", self.t_exec);
        for counts in &self.counts {
            out.push_str("\n[[circuit]]\n");
            for (bits, n) in counts {
                out.push_str(&format!("\"{bits}\" = {n}\n"));
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let r: ResultRecord =
            toml::from_str(text).map_err(|e| BlackboxError::ResultFormat(e.to_string()))?;
        Self::new(r.circuit, r.t_exec_seconds)
    }
}

/// Runs `job` on the hidden device model.
pub fn submit_job(device: &DeviceModel, job: &Job) -> Result<JobResult> {
    if job.shots == 0 {
        return Err(BlackboxError::EmptyJob("shots = 0".into()));
    }
    if job.circuits.is_empty() {
        return Err(BlackboxError::EmptyJob("no circuits".into()));
    }
    let durations = job
        .circuits
        .iter()
        .map(|c| circuit_duration(device, c))
        .collect::<Result<Vec<f64>>>()?;

    let seed = job.seed.unwrap_or_else(rand::random);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let oh = device.overheads();
    let jitter = if oh.jitter_stddev > 0.0 {
        Normal::new(0.0, oh.jitter_stddev)
            .expect("validated stddev")
            .sample(&mut rng)
    } else {
        0.0
    };

    let mut counts = Vec::with_capacity(job.circuits.len());
    for c in &job.circuits {
        let probs = final_state(device, c)?.probabilities();
        counts.push(sample_counts(&probs, c.n_qubits(), device.levels(), job.shots, &mut rng));
    }

    let shots = job.shots as f64;
    let raw = oh.per_job
        + durations
            .iter()
            .map(|d| shots * (oh.t_init + d + oh.t_meas) + oh.per_circuit)
            .sum::<f64>()
        + jitter;
    let mut t_exec = raw.max(0.0);
    if oh.time_resolution > 0.0 {
        t_exec = (t_exec / oh.time_resolution).round() * oh.time_resolution;
    }
    JobResult::new(counts, t_exec)
}

/// Hidden gate time of one pass through `circuit`.
fn circuit_duration(device: &DeviceModel, circuit: &Circuit) -> Result<f64> {
    if circuit.n_qubits() > device.num_qubits() {
        return Err(BlackboxError::TooManyQubits {
            requested: circuit.n_qubits(),
            available: device.num_qubits(),
        });
    }
    let mut total = 0.0;
    for block in circuit.blocks() {
        let mut pass = 0.0;
        for ins in &block.body {
            if device.gate(&ins.gate).is_none() {
                return Err(BlackboxError::UnknownGate { name: ins.gate.clone(), line: ins.line });
            }
            pass += device.realization_for(&ins.gate, &ins.qubits)?.duration;
        }
        total += block.repeat as f64 * pass;
    }
    Ok(total)
}

fn final_state(device: &DeviceModel, circuit: &Circuit) -> Result<StateVector> {
    let n = circuit.n_qubits();
    let levels = device.levels();
    let dim = levels.pow(n as u32);
    let mut psi = StateVector::basis(dim, 0)?;
    for block in circuit.blocks() {
        let mut u = ComplexMatrix::identity(dim);
        for ins in &block.body {
            let spec = device.gate(&ins.gate).expect("checked in circuit_duration");
            u = &embed(&spec.unitary, &ins.qubits, n, levels) * &u;
        }
        psi = u.pow(block.repeat).apply(&psi);
    }
    Ok(psi)
}

fn bitstring(mut index: usize, n: usize, levels: usize) -> String {
    let mut digits = vec![b'0'; n];
    for d in digits.iter_mut().rev() {
        *d = b'0' + (index % levels) as u8;
        index /= levels;
    }
    String::from_utf8(digits).expect("ascii digits")
}

/// Multinomial draw as a chain of conditional binomials.
fn sample_counts(
    probs: &[f64],
    n: usize,
    levels: usize,
    shots: u64,
    rng: &mut impl Rng,
) -> BTreeMap<String, u64> {
    let mut counts = BTreeMap::new();
    let mut remaining = shots;
    let mut mass: f64 = probs.iter().sum();
    let last = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    for (k, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        let drawn = if k == last {
            remaining
        } else if p <= 0.0 {
            0
        } else {
            let q = (p / mass).clamp(0.0, 1.0);
            Binomial::new(remaining, q).expect("q in [0, 1]").sample(rng)
        };
        mass -= p;
        if drawn > 0 {
            counts.insert(bitstring(k, n, levels), drawn);
            remaining -= drawn;
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;
    use crate::config::DeviceConfig;

    fn quiet_device() -> DeviceModel {
        let mut cfg = DeviceConfig::default_device();
        cfg.overheads.jitter_stddev = 0.0;
        cfg.overheads.time_resolution = 0.0;
        DeviceModel::from_config(&cfg).unwrap()
    }

    #[test]
    fn single_x_flips_every_shot() {
        let d = DeviceModel::default_device();
        let job = Job::new(vec![parse_circuit("qubits 1\nX q0").unwrap()], 1000).with_seed(3);
        let r = submit_job(&d, &job).unwrap();
        assert_eq!(r.counts()[0].get("1"), Some(&1000));
        assert_eq!(r.counts()[0].len(), 1);
    }

    #[test]
    fn exact_timing_without_jitter() {
        let d = quiet_device();
        let job = Job::new(vec![parse_circuit("qubits 1\nX q0").unwrap()], 1000).with_seed(3);
        let r = submit_job(&d, &job).unwrap();
        let expected = 5.0 + 1000.0 * (100e-6 + 32e-9 + 300e-6);
        assert!((r.t_exec() - expected).abs() < 1e-12, "{}", r.t_exec());
    }

    #[test]
    fn even_repeats_return_to_zero() {
        let d = DeviceModel::default_device();
        let c = Circuit::repeated("X", &[0], 200_000).unwrap();
        let r = submit_job(&d, &Job::new(vec![c], 100).with_seed(1)).unwrap();
        assert_eq!(r.counts()[0].get("0"), Some(&100));
    }

    #[test]
    fn default_overheads_amplification_total() {
        let d = quiet_device();
        let c = Circuit::repeated("X", &[0], 500_000).unwrap();
        let r = submit_job(&d, &Job::new(vec![c], 1000).with_seed(1)).unwrap();
        // 5 s per job + 1000·(400 µs) + 1000·5e5·32 ns = 5 + 0.4 + 16
        assert!((r.t_exec() - 21.4).abs() < 1e-9, "{}", r.t_exec());
    }

    #[test]
    fn rounding_to_resolution() {
        let mut cfg = DeviceConfig::default_device();
        cfg.overheads.jitter_stddev = 0.0;
        let d = DeviceModel::from_config(&cfg).unwrap();
        let c = Circuit::repeated("X", &[0], 500_000).unwrap();
        let r = submit_job(&d, &Job::new(vec![c], 1000).with_seed(1)).unwrap();
        assert_eq!(r.t_exec(), 21.0);
    }

    #[test]
    fn empty_jobs() {
        let d = DeviceModel::default_device();
        let c = parse_circuit("qubits 1\nX q0").unwrap();
        assert!(matches!(
            submit_job(&d, &Job::new(vec![c], 0)),
            Err(BlackboxError::EmptyJob(_))
        ));
        assert!(matches!(submit_job(&d, &Job::new(vec![], 10)), Err(BlackboxError::EmptyJob(_))));
    }

    #[test]
    fn device_level_validation() {
        let d = DeviceModel::default_device();
        let not_adjacent = parse_circuit("qubits 3\nCZ q0 q2").unwrap();
        assert!(matches!(
            submit_job(&d, &Job::new(vec![not_adjacent], 1)),
            Err(BlackboxError::NotConnected { .. })
        ));
        let too_wide = parse_circuit("qubits 4\nX q3").unwrap();
        assert!(matches!(
            submit_job(&d, &Job::new(vec![too_wide], 1)),
            Err(BlackboxError::TooManyQubits { .. })
        ));
        let missing = parse_circuit("qubits 1\nSX q0").unwrap();
        assert!(matches!(
            submit_job(&d, &Job::new(vec![missing], 1)),
            Err(BlackboxError::UnknownGate { line: 2, .. })
        ));
    }

    #[test]
    fn seeded_jobs_are_deterministic() {
        let d = DeviceModel::default_device();
        let c = parse_circuit("qubits 3\nH q0\nCNOT q0 q1\nCNOT q1 q2").unwrap();
        let job = Job::new(vec![c.clone(), c], 500).with_seed(77);
        assert_eq!(submit_job(&d, &job).unwrap(), submit_job(&d, &job).unwrap());
    }

    #[test]
    fn three_qubit_gates_act_as_declared() {
        let d = DeviceModel::default_device();
        let c = parse_circuit("qubits 3\nX q0\nX q2\nToffoli q0 q2 q1").unwrap();
        let r = submit_job(&d, &Job::new(vec![c], 10).with_seed(0)).unwrap();
        assert_eq!(r.counts()[0].get("111"), Some(&10));
    }

    #[test]
    fn three_level_bitstrings() {
        let mut cfg = DeviceConfig::default_device();
        cfg.levels = 3;
        let d = DeviceModel::from_config(&cfg).unwrap();
        let c = parse_circuit("qubits 2\nX q1").unwrap();
        let r = submit_job(&d, &Job::new(vec![c], 10).with_seed(0)).unwrap();
        assert_eq!(r.counts()[0].get("01"), Some(&10));
    }

    #[test]
    fn text_round_trip() {
        let d = DeviceModel::default_device();
        let c = parse_circuit("qubits 2\nH q0\nCNOT q0 q1").unwrap();
        let r = submit_job(&d, &Job::new(vec![c.clone(), c], 100).with_seed(5)).unwrap();
        let text = r.to_text();
        assert!(text.starts_with(&format!("t_exec_seconds = {:.3}\n", r.t_exec())));
        assert_eq!(JobResult::from_text(&text).unwrap(), r);
        assert!(JobResult::from_text("t_exec_seconds = -1.0").is_err());
        assert!(JobResult::from_text("hidden = 1").is_err());
    }

    #[test]
    fn bitstrings() {
        assert_eq!(bitstring(5, 3, 2), "101");
        assert_eq!(bitstring(5, 2, 3), "12");
    }
}
