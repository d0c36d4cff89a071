//! A mock cloud quantum computer. The device model (gate Hamiltonians,
//! durations, connectivity, overheads) stays hidden behind [`submit_job`],
//! which returns only shot counts and a coarse execution time.

pub mod circuit;
pub mod config;
pub mod device;
pub mod error;
pub mod gates;
pub mod job;

pub use circuit::{parse_circuit, Block, Circuit, Instruction};
pub use config::{DeviceConfig, PulseShape, Pattern, DEFAULT_DEVICE_CONFIG, DEFAULT_DEVICE_FILE};
pub use device::{build_drive, load_device, DeviceModel, GateSpec, OverheadModel, Realization};
pub use error::{BlackboxError, Result};
pub use gates::{canonical_name, embed, gate_unitary, GATE_NAMES};
pub use job::{submit_job, Job, JobResult};
