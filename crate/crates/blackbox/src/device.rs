//! Hidden device model: gate drives, durations, connectivity and overheads.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::{PI, SQRT_2};

use qslprobe_core::dynamics::{propagate_unitary, MIN_STEPS};
use qslprobe_core::{logm_principal_nonneg, ComplexMatrix, HamiltonianTrajectory};
use statrs::function::erf::erf;

use crate::config::{DeviceConfig, GateConfig, OverheadConfig, Pattern, PulseShape};
use crate::error::{BlackboxError, Result};
use crate::gates::{canonical_name, embed, gate_unitary};

/// Required gate fidelity between a drive's propagator and its unitary.
pub const REALIZATION_TOL: f64 = 1e-6;
/// Steps used to propagate smooth pulses during validation.
pub const VALIDATION_STEPS: usize = 512;
const DECOMPOSITION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct OverheadModel {
    pub t_init: f64,
    pub t_meas: f64,
    pub per_circuit: f64,
    pub per_job: f64,
    pub jitter_stddev: f64,
    pub time_resolution: f64,
}

impl OverheadModel {
    fn from_config(c: &OverheadConfig) -> Result<Self> {
        let fields = [
            ("t_init", c.t_init),
            ("t_meas", c.t_meas),
            ("per_circuit", c.per_circuit),
            ("per_job", c.per_job),
            ("jitter_stddev", c.jitter_stddev),
            ("time_resolution", c.time_resolution),
        ];
        for (name, v) in fields {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(BlackboxError::Config(format!("overhead {name} = {v} must be ≥ 0")));
            }
        }
        Ok(Self {
            t_init: c.t_init,
            t_meas: c.t_meas,
            per_circuit: c.per_circuit,
            per_job: c.per_job,
            jitter_stddev: c.jitter_stddev,
            time_resolution: c.time_resolution,
        })
    }
}

/// How a gate is carried out for one connectivity pattern.
#[derive(Debug, Clone)]
pub struct Realization {
    pub duration: f64,
    /// `None` for virtual gates.
    pub drive: Option<HamiltonianTrajectory>,
    pub decomposition: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct GateSpec {
    pub name: String,
    pub arity: usize,
    /// Gate unitary on the computational states (dimension 2^arity).
    pub unitary: ComplexMatrix,
    pub is_virtual: bool,
    pub realizations: BTreeMap<Pattern, Realization>,
}

impl GateSpec {
    pub fn realization(&self, pattern: Pattern) -> Option<&Realization> {
        self.realizations.get(&pattern)
    }
}

/// Immutable device ground truth. Jobs only ever see counts and t_exec.
#[derive(Debug, Clone)]
pub struct DeviceModel {
    name: String,
    qubits: usize,
    levels: usize,
    coupling: BTreeSet<(usize, usize)>,
    overheads: OverheadModel,
    gates: BTreeMap<String, GateSpec>,
}

pub fn load_device(text: &str) -> Result<DeviceModel> {
    DeviceModel::from_config(&DeviceConfig::parse(text)?)
}

impl DeviceModel {
    pub fn default_device() -> Self {
        Self::from_config(&DeviceConfig::default_device()).expect("shipped config is valid")
    }

    pub fn from_config(cfg: &DeviceConfig) -> Result<Self> {
        if cfg.qubits == 0 {
            return Err(BlackboxError::Config("device needs at least one qubit".into()));
        }
        if !(2..=3).contains(&cfg.levels) {
            return Err(BlackboxError::Config(format!("levels must be 2 or 3, got {}", cfg.levels)));
        }
        let mut coupling = BTreeSet::new();
        for &[a, b] in &cfg.coupling {
            if a == b || a >= cfg.qubits || b >= cfg.qubits {
                return Err(BlackboxError::Config(format!("bad coupling [{a}, {b}]")));
            }
            coupling.insert((a.min(b), a.max(b)));
        }
        let overheads = OverheadModel::from_config(&cfg.overheads)?;
        let mut gates = BTreeMap::new();
        for g in &cfg.gates {
            let spec = build_gate(g, cfg.levels)?;
            if gates.insert(spec.name.clone(), spec).is_some() {
                return Err(BlackboxError::Config(format!("gate {} declared twice", g.name)));
            }
        }
        Ok(Self {
            name: cfg.name.clone(),
            qubits: cfg.qubits,
            levels: cfg.levels,
            coupling,
            overheads,
            gates,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn overheads(&self) -> &OverheadModel {
        &self.overheads
    }

    pub fn gate(&self, name: &str) -> Option<&GateSpec> {
        canonical_name(name).and_then(|n| self.gates.get(n))
    }

    pub fn gates(&self) -> impl Iterator<Item = &GateSpec> {
        self.gates.values()
    }

    pub fn coupled(&self, a: usize, b: usize) -> bool {
        self.coupling.contains(&(a.min(b), a.max(b)))
    }

    /// Adjacency pattern of `qubits` (controls first, target last), if the
    /// qubits form a connected set.
    pub fn pattern(&self, qubits: &[usize]) -> Option<Pattern> {
        match *qubits {
            [_] => Some(Pattern::Single),
            [a, b] => self.coupled(a, b).then_some(Pattern::Adjacent),
            [c0, c1, t] => {
                let (a, b, c) = (self.coupled(c0, t), self.coupled(c1, t), self.coupled(c0, c1));
                match (a, b, c) {
                    (true, true, true) => Some(Pattern::Full),
                    (true, true, false) => Some(Pattern::TargetMiddle),
                    (true, false, true) | (false, true, true) => Some(Pattern::TargetEnd),
                    _ => None,
                }
            }
            _ => None,
        }
    }

    /// The realization used when `gate` acts on `qubits`.
    pub fn realization_for(&self, gate: &str, qubits: &[usize]) -> Result<&Realization> {
        let spec = self.gate(gate).ok_or_else(|| BlackboxError::UnknownGate {
            name: gate.to_string(),
            line: 0,
        })?;
        if spec.is_virtual {
            return Ok(&spec.realizations[&Pattern::Single]);
        }
        self.pattern(qubits)
            .and_then(|p| spec.realization(p))
            .ok_or_else(|| BlackboxError::NotConnected {
                gate: spec.name.clone(),
                qubits: qubits.to_vec(),
            })
    }
}

fn build_gate(g: &GateConfig, levels: usize) -> Result<GateSpec> {
    let name = canonical_name(&g.name).ok_or_else(|| BlackboxError::UnknownGate {
        name: g.name.clone(),
        line: 0,
    })?;
    let (unitary, arity) = gate_unitary(name)?;
    let bad = |msg: String| Err(BlackboxError::Config(format!("gate {name}: {msg}")));
    let mut realizations = BTreeMap::new();

    if g.is_virtual {
        if arity != 1 {
            return bad("only single-qubit gates can be virtual".into());
        }
        if g.duration.is_some_and(|d| d != 0.0) || g.pulse.is_some() || !g.variants.is_empty() {
            return bad("virtual gates take no duration, pulse or variants".into());
        }
        realizations.insert(
            Pattern::Single,
            Realization { duration: 0.0, drive: None, decomposition: Vec::new() },
        );
    } else if arity < 3 {
        if !g.variants.is_empty() {
            return bad("connectivity variants are for three-qubit gates".into());
        }
        let Some(duration) = g.duration.filter(|d| *d > 0.0 && d.is_finite()) else {
            return bad("physical gates need a positive duration".into());
        };
        let shape = g.pulse.unwrap_or(PulseShape::Square);
        let drive = validated_drive(name, &unitary, arity, levels, duration, shape, g.drive_strength)?;
        let pattern = if arity == 1 { Pattern::Single } else { Pattern::Adjacent };
        realizations.insert(
            pattern,
            Realization { duration, drive: Some(drive), decomposition: Vec::new() },
        );
    } else {
        if g.duration.is_some() {
            return bad("three-qubit gates take their durations from variants".into());
        }
        for v in &g.variants {
            if matches!(v.pattern, Pattern::Single | Pattern::Adjacent) {
                return bad(format!("pattern {} is not a three-qubit pattern", v.pattern));
            }
            if !(v.duration > 0.0 && v.duration.is_finite()) {
                return bad(format!("variant {} needs a positive duration", v.pattern));
            }
            if !v.decomposition.is_empty() {
                check_decomposition(name, &unitary, &v.decomposition)?;
            }
            let shape = g.pulse.unwrap_or(PulseShape::Square);
            let drive =
                validated_drive(name, &unitary, arity, levels, v.duration, shape, g.drive_strength)?;
            let r = Realization {
                duration: v.duration,
                drive: Some(drive),
                decomposition: v.decomposition.clone(),
            };
            if realizations.insert(v.pattern, r).is_some() {
                return bad(format!("variant {} declared twice", v.pattern));
            }
        }
    }
    Ok(GateSpec {
        name: name.to_string(),
        arity,
        unitary,
        is_virtual: g.is_virtual,
        realizations,
    })
}

/// Multiplies out a role-labelled native sequence and compares it with the
/// gate unitary up to global phase.
fn check_decomposition(name: &str, unitary: &ComplexMatrix, steps: &[String]) -> Result<()> {
    let bad = |msg: String| BlackboxError::Config(format!("gate {name} decomposition: {msg}"));
    let mut product = ComplexMatrix::identity(8);
    for step in steps {
        let mut words = step.split_whitespace();
        let gate = words.next().ok_or_else(|| bad("empty step".into()))?;
        let sites = words
            .map(|role| match role {
                "c0" => Ok(0),
                "c1" => Ok(1),
                "t" => Ok(2),
                other => Err(bad(format!("unknown role `{other}`"))),
            })
            .collect::<Result<Vec<usize>>>()?;
        let (u, arity) = gate_unitary(gate).map_err(|_| bad(format!("unknown gate `{gate}`")))?;
        if arity != sites.len() {
            return Err(bad(format!("`{step}` has the wrong number of qubits")));
        }
        product = &embed(&u, &sites, 3, 2) * &product;
    }
    let fidelity = unitary.gate_fidelity(&product)?;
    if 1.0 - fidelity > DECOMPOSITION_TOL {
        return Err(bad(format!("reproduces the gate with fidelity {fidelity:.9}")));
    }
    Ok(())
}

fn validated_drive(
    name: &str,
    unitary: &ComplexMatrix,
    arity: usize,
    levels: usize,
    duration: f64,
    shape: PulseShape,
    strength: Option<f64>,
) -> Result<HamiltonianTrajectory> {
    let sites: Vec<usize> = (0..arity).collect();
    let target = embed(unitary, &sites, arity, levels);
    let drive = build_drive(&target, &sites, levels, duration, shape, strength)?;
    let steps = match shape {
        PulseShape::Gaussian => VALIDATION_STEPS,
        PulseShape::Square | PulseShape::TwoSegment => MIN_STEPS,
    };
    let realized = propagate_unitary(&drive, steps)?;
    let fidelity = target.gate_fidelity(&realized)?;
    if 1.0 - fidelity > REALIZATION_TOL {
        return Err(BlackboxError::GateRealizationMismatch {
            gate: name.to_string(),
            fidelity,
        });
    }
    Ok(drive)
}

/// Drive Hamiltonian for `target` (already embedded in the local register)
/// over `duration`.
///
/// With generator G (U = e^{−iG}, spectrum in [0, 2π)) a pulse of peak
/// strength Ω has H(t) = Ω·f(t)·G/π. Without an explicit strength Ω is the
/// value that realizes U exactly.
pub fn build_drive(
    target: &ComplexMatrix,
    sites: &[usize],
    levels: usize,
    duration: f64,
    shape: PulseShape,
    strength: Option<f64>,
) -> Result<HamiltonianTrajectory> {
    let g = logm_principal_nonneg(target, 1.0)?;
    match shape {
        PulseShape::Square => {
            let omega = strength.unwrap_or(PI / duration);
            Ok(HamiltonianTrajectory::constant(g.scale(omega / PI), duration)?)
        }
        PulseShape::Gaussian => {
            let sigma = duration / 4.0;
            let center = duration / 2.0;
            // ∫₀^τ exp(−(t−τ/2)²/2σ²) dt
            let area = sigma * (2.0 * PI).sqrt() * erf(center / (SQRT_2 * sigma));
            let omega = strength.unwrap_or(PI / area);
            let envelope = move |t: f64| omega / PI * (-(t - center).powi(2) / (2.0 * sigma * sigma)).exp();
            Ok(HamiltonianTrajectory::enveloped(g, duration, envelope)?)
        }
        PulseShape::TwoSegment => {
            // First half rotates by W = Y⊗…⊗Y, second half by U·W†.
            let k = sites.len();
            let mut y = ComplexMatrix::pauli_y();
            for _ in 1..k {
                y = y.kron(&ComplexMatrix::pauli_y());
            }
            let w = embed(&y, sites, k, levels);
            let g1 = logm_principal_nonneg(&w, 1.0)?;
            let g2 = logm_principal_nonneg(&(target * &w.dagger()), 1.0)?;
            let half = duration / 2.0;
            let omega = strength.unwrap_or(PI / half);
            Ok(HamiltonianTrajectory::piecewise_constant(vec![
                (half, g1.scale(omega / PI)),
                (half, g2.scale(omega / PI)),
            ])?)
        }
    }
}
