//! Device configuration schema (TOML).

use serde::{Deserialize, Serialize};

use crate::error::{BlackboxError, Result};

/// The shipped default device, a three-qubit linear chain with
/// transmon-like gate durations.
pub const DEFAULT_DEVICE_CONFIG: &str = include_str!("../ibm-torino-like.cfg");
pub const DEFAULT_DEVICE_FILE: &str = "ibm-torino-like.cfg";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PulseShape {
    Square,
    Gaussian,
    TwoSegment,
}

/// Qubit-adjacency pattern of the qubits a gate acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pattern {
    Single,
    Adjacent,
    /// All three pairs coupled.
    Full,
    /// Target coupled to both controls, controls not coupled.
    TargetMiddle,
    /// Chain with the target at one end.
    TargetEnd,
}

impl std::fmt::Display for Pattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Pattern::Single => "single",
            Pattern::Adjacent => "adjacent",
            Pattern::Full => "full",
            Pattern::TargetMiddle => "target-middle",
            Pattern::TargetEnd => "target-end",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverheadConfig {
    pub t_init: f64,
    pub t_meas: f64,
    #[serde(default)]
    pub per_circuit: f64,
    #[serde(default)]
    pub per_job: f64,
    #[serde(default)]
    pub jitter_stddev: f64,
    #[serde(default)]
    pub time_resolution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariantConfig {
    pub pattern: Pattern,
    pub duration: f64,
    /// Native-gate sequence over the roles `c0`, `c1`, `t`, e.g. `"CNOT c1 t"`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub decomposition: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateConfig {
    pub name: String,
    #[serde(default, rename = "virtual")]
    pub is_virtual: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pulse: Option<PulseShape>,
    /// Peak drive angular frequency in rad/s. When absent it is chosen so the
    /// pulse realizes the gate exactly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drive_strength: Option<f64>,
    #[serde(default, rename = "variant", skip_serializing_if = "Vec::is_empty")]
    pub variants: Vec<VariantConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceConfig {
    pub name: String,
    pub qubits: usize,
    #[serde(default = "default_levels")]
    pub levels: usize,
    #[serde(default)]
    pub coupling: Vec<[usize; 2]>,
    pub overheads: OverheadConfig,
    #[serde(default, rename = "gate")]
    pub gates: Vec<GateConfig>,
}

fn default_levels() -> usize {
    2
}

impl DeviceConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| BlackboxError::Config(e.to_string()))
    }

    pub fn default_device() -> Self {
        Self::parse(DEFAULT_DEVICE_CONFIG).expect("shipped config parses")
    }

    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("config is serializable")
    }

    pub fn gate_mut(&mut self, name: &str) -> Option<&mut GateConfig> {
        self.gates.iter_mut().find(|g| g.name == name)
    }
}
