//! The only channel between the estimator and a device.

use std::collections::HashMap;
use std::sync::Mutex;

use qslprobe_blackbox::{submit_job, DeviceModel, Job, JobResult};

use crate::error::{EstimatorError, Result};

/// Something that runs jobs and reports counts plus total execution time.
pub trait Backend: Sync {
    fn submit(&self, job: &Job) -> Result<JobResult>;
    fn num_qubits(&self) -> usize;
}

impl Backend for DeviceModel {
    fn submit(&self, job: &Job) -> Result<JobResult> {
        Ok(submit_job(self, job)?)
    }

    fn num_qubits(&self) -> usize {
        DeviceModel::num_qubits(self)
    }
}

fn job_key(job: &Job) -> String {
    let circuits: Vec<String> = job.circuits.iter().map(|c| c.to_string()).collect();
    format!("shots {} seed {:?}\n{}", job.shots, job.seed, circuits.join("---\n"))
}

/// Wraps a backend and remembers every result (or error) it returns.
pub struct RecordingBackend<'a, B: Backend + ?Sized> {
    inner: &'a B,
    log: Mutex<HashMap<String, Result<JobResult>>>,
}

impl<'a, B: Backend + ?Sized> RecordingBackend<'a, B> {
    pub fn new(inner: &'a B) -> Self {
        Self { inner, log: Mutex::new(HashMap::new()) }
    }

    pub fn into_replay(self) -> ReplayBackend {
        ReplayBackend {
            qubits: self.inner.num_qubits(),
            results: self.log.into_inner().expect("log lock"),
        }
    }
}

impl<B: Backend + ?Sized> Backend for RecordingBackend<'_, B> {
    fn submit(&self, job: &Job) -> Result<JobResult> {
        let r = self.inner.submit(job);
        self.log.lock().expect("log lock").insert(job_key(job), r.clone());
        r
    }

    fn num_qubits(&self) -> usize {
        self.inner.num_qubits()
    }
}

/// Serves previously recorded results; knows nothing about any device.
pub struct ReplayBackend {
    qubits: usize,
    results: HashMap<String, Result<JobResult>>,
}

impl ReplayBackend {
    pub fn len(&self) -> usize {
        self.results.len()
    }

    pub fn is_empty(&self) -> bool {
        self.results.is_empty()
    }
}

impl Backend for ReplayBackend {
    fn submit(&self, job: &Job) -> Result<JobResult> {
        self.results.get(&job_key(job)).cloned().unwrap_or(Err(EstimatorError::NotRecorded))
    }

    fn num_qubits(&self) -> usize {
        self.qubits
    }
}
