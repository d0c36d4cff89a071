//! User-side inference: gate-time amplification against a black-box
//! backend, regression, τₙ selection and speed-limit energy estimates.

pub mod amplify;
pub mod backend;
pub mod energy;
pub mod error;
pub mod fit;
pub mod pipeline;
pub mod report;
pub mod store;

pub use amplify::{default_threshold, run_amplification, AmplificationPlan, AmplificationRun};
pub use backend::{Backend, RecordingBackend, ReplayBackend};
pub use energy::{energies, estimate_energy, estimate_tau_n, fastest, EnergyEstimate};
pub use error::{EstimatorError, Result};
pub use fit::{fit_gate_time, fit_run, ols, GateTimeEstimate, RegressionFit};
pub use pipeline::{all_qubit_choices, estimate_gates, EstimationSettings, GateRequest, Estimation};
pub use report::{report, Report};
pub use store::{load_store, ExperimentStore, StoreRecord};
