//! Regression of execution time on repetition count.

use crate::amplify::{AmplificationRun, MIN_FIT_POINTS};
use crate::error::{EstimatorError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionFit {
    /// Seconds per gate repetition (all shots together).
    pub slope: f64,
    pub slope_stderr: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub threshold_used: u64,
    pub points_used: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateTimeEstimate {
    /// Gate and qubits, e.g. `Toffoli q0 q2 q1`.
    pub gate: String,
    pub arity: usize,
    pub t_gate: f64,
    pub t_gate_stderr: f64,
    pub fit: RegressionFit,
    pub is_virtual: bool,
}

/// Ordinary least squares of t_exec on n_gate over points with
/// n_gate ≥ `threshold`.
pub fn ols(data: &[(u64, f64)], threshold: u64) -> Result<RegressionFit> {
    let pts: Vec<(f64, f64)> = data
        .iter()
        .filter(|(n, _)| *n >= threshold)
        .map(|&(n, t)| (n as f64, t))
        .collect();
    let insufficient = || EstimatorError::InsufficientData {
        points: pts.len(),
        threshold,
        needed: MIN_FIT_POINTS,
    };
    if pts.len() < MIN_FIT_POINTS {
        return Err(insufficient());
    }
    let m = pts.len() as f64;
    let x_mean = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let y_mean = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - x_mean).powi(2)).sum();
    if sxx == 0.0 {
        return Err(insufficient());
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - x_mean) * (p.1 - y_mean)).sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let ssr: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let sst: f64 = pts.iter().map(|p| (p.1 - y_mean).powi(2)).sum();
    let r_squared = if sst > 0.0 { 1.0 - ssr / sst } else { 1.0 };
    let slope_stderr = (ssr / (m - 2.0) / sxx).sqrt();
    Ok(RegressionFit {
        slope,
        slope_stderr,
        intercept,
        r_squared,
        threshold_used: threshold,
        points_used: pts.len(),
    })
}

/// t_gate = slope / n_shots. A slope within two standard errors of zero
/// (or below) marks the gate virtual; a slope more than two standard errors
/// below zero is rejected.
pub fn fit_gate_time(
    gate: &str,
    arity: usize,
    data: &[(u64, f64)],
    n_shots: u64,
    threshold: u64,
) -> Result<GateTimeEstimate> {
    if n_shots == 0 {
        return Err(EstimatorError::InvalidPlan("n_shots = 0".into()));
    }
    let fit = ols(data, threshold)?;
    if fit.slope < -2.0 * fit.slope_stderr {
        return Err(EstimatorError::NegativeSlope { gate: gate.to_string(), slope: fit.slope });
    }
    let shots = n_shots as f64;
    Ok(GateTimeEstimate {
        gate: gate.to_string(),
        arity,
        t_gate: fit.slope / shots,
        t_gate_stderr: fit.slope_stderr / shots,
        is_virtual: fit.slope <= 2.0 * fit.slope_stderr,
        fit,
    })
}

/// Fits a finished amplification run with its own threshold.
pub fn fit_run(run: &AmplificationRun) -> Result<GateTimeEstimate> {
    fit_gate_time(
        &run.plan.label(),
        run.plan.qubits.len(),
        &run.points,
        run.plan.n_shots,
        run.threshold,
    )
}
