use proptest::prelude::*;
use qslprobe_blackbox::{DeviceConfig, DeviceModel, Pattern};
use qslprobe_estimator::{
    all_qubit_choices, estimate_gates, estimate_tau_n, fit_gate_time, fit_run, run_amplification,
    AmplificationPlan, EstimationSettings, EstimatorError, GateTimeEstimate, RecordingBackend, RegressionFit,
    ReplayBackend,
};

fn device(jitter: f64, resolution: f64) -> DeviceModel {
    let mut cfg = DeviceConfig::default_device();
    cfg.overheads.jitter_stddev = jitter;
    cfg.overheads.time_resolution = resolution;
    DeviceModel::from_config(&cfg).unwrap()
}

fn table_gates() -> Vec<String> {
    ["X", "Y", "Z", "CZ", "CNOT", "iSWAP", "Toffoli", "iToffoli", "CCZ"]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

#[test]
fn recovered_times_match_hidden_durations() {
    let d = device(0.0, 0.0);
    let requests = all_qubit_choices(&table_gates(), 3).unwrap();
    let settings = EstimationSettings {
        n_gate_values: vec![0, 1000, 2000, 3000, 4000, 5000],
        n_shots: 1000,
        seed: 9,
        threshold: None,
    };
    let run = estimate_gates(&d, &requests, &settings, None).unwrap();
    // CZ/CNOT/iSWAP on (0, 2) and (2, 0) are not coupled
    assert_eq!(run.skipped.len(), 6);
    for e in &run.estimates {
        let mut words = e.gate.split_whitespace();
        let gate = words.next().unwrap();
        let qubits: Vec<usize> = words.map(|w| w[1..].parse().unwrap()).collect();
        let hidden = d.realization_for(gate, &qubits).unwrap().duration;
        if hidden == 0.0 {
            assert!(e.is_virtual, "{}", e.gate);
        } else {
            let rel = (e.t_gate - hidden).abs() / hidden;
            assert!(rel < 1e-12, "{}: {:e} vs {:e}", e.gate, e.t_gate, hidden);
        }
    }
    let tau: Vec<f64> = (1..=3).map(|n| estimate_tau_n(&run.estimates, n).unwrap()).collect();
    let close = |a: f64, b: f64| (a - b).abs() < 1e-12 * b;
    assert!(close(tau[0], 32e-9) && close(tau[1], 70e-9) && close(tau[2], 500e-9), "{tau:?}");
}

#[test]
fn estimates_depend_only_on_job_results() {
    let d = DeviceModel::default_device();
    let requests = all_qubit_choices(&["X".into(), "CZ".into(), "iToffoli".into()], 3).unwrap();
    let settings = EstimationSettings {
        n_gate_values: vec![0, 100_000, 200_000, 300_000, 400_000, 500_000],
        n_shots: 1000,
        seed: 21,
        threshold: Some(100_000),
    };
    let recorder = RecordingBackend::new(&d);
    let live = estimate_gates(&recorder, &requests, &settings, None).unwrap();
    let replay: ReplayBackend = recorder.into_replay();
    assert!(!replay.is_empty());
    let replayed = estimate_gates(&replay, &requests, &settings, None).unwrap();
    assert_eq!(live.estimates, replayed.estimates);
    assert_eq!(live.energies, replayed.energies);
}

#[test]
fn virtual_gate_slope_is_not_significant() {
    let d = DeviceModel::default_device();
    for seed in 0..20 {
        let plan = AmplificationPlan::new("Z", &[0], vec![0, 100_000, 200_000, 300_000, 400_000, 500_000], 1000, seed)
            .with_threshold(100_000);
        let run = run_amplification(&d, &plan, None).unwrap();
        let e = match fit_run(&run) {
            Ok(e) => e,
            // a 2.5%-level event for a zero-duration gate
            Err(EstimatorError::NegativeSlope { .. }) => continue,
            Err(e) => panic!("{e}"),
        };
        assert!(e.t_gate.abs() < 10e-9, "seed {seed}: {:e}", e.t_gate);
    }
}

/// Spread of the X-gate estimate under 0.5 s jitter and 1 s resolution
/// follows OLS theory: sd(slope) = σ/√Sxx with σ² = 0.25 + 1/12.
#[test]
fn slope_spread_matches_noise_model() {
    let d = DeviceModel::default_device();
    let values = vec![0, 100_000, 200_000, 300_000, 400_000, 500_000];
    let threshold = 100_000u64;
    let trials = 300;
    let errors: Vec<f64> = (0..trials)
        .map(|seed| {
            let plan = AmplificationPlan::new("X", &[0], values.clone(), 1000, seed)
                .with_threshold(threshold);
            let run = run_amplification(&d, &plan, None).unwrap();
            fit_run(&run).unwrap().t_gate / 32e-9 - 1.0
        })
        .collect();
    let mean = errors.iter().sum::<f64>() / trials as f64;
    let sd = (errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (trials - 1) as f64).sqrt();
    let xs: Vec<f64> = values.iter().filter(|&&n| n >= threshold).map(|&n| n as f64).collect();
    let xm = xs.iter().sum::<f64>() / xs.len() as f64;
    let sxx: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
    let sigma = (0.25f64 + 1.0 / 12.0).sqrt();
    let predicted = sigma / sxx.sqrt() / (1000.0 * 32e-9);
    assert!((sd / predicted - 1.0).abs() < 0.15, "sd {sd:.4} vs predicted {predicted:.4}");
    assert!(mean.abs() < 3.0 * predicted / (trials as f64).sqrt() + 1e-3, "bias {mean}");
}

#[test]
fn slower_variant_is_recorded_but_not_selected() {
    let d = device(0.0, 0.0);
    let middle = d.gate("Toffoli").unwrap().realization(Pattern::TargetMiddle).unwrap().duration;
    let plan = |qs: &[usize]| AmplificationPlan::new("Toffoli", qs, vec![0, 10, 20, 30, 40], 100, 3);
    let a = fit_run(&run_amplification(&d, &plan(&[0, 2, 1]), None).unwrap()).unwrap();
    let b = fit_run(&run_amplification(&d, &plan(&[0, 1, 2]), None).unwrap()).unwrap();
    assert!(b.t_gate > a.t_gate);
    assert!((estimate_tau_n(&[a, b], 3).unwrap() - middle).abs() < 1e-12 * middle);
}

fn estimate(t: f64, arity: usize, is_virtual: bool) -> GateTimeEstimate {
    GateTimeEstimate {
        gate: format!("G{arity}"),
        arity,
        t_gate: t,
        t_gate_stderr: 0.0,
        fit: RegressionFit {
            slope: t,
            slope_stderr: 0.0,
            intercept: 0.0,
            r_squared: 1.0,
            threshold_used: 0,
            points_used: 3,
        },
        is_virtual,
    }
}

proptest! {
    #[test]
    fn adding_a_slower_gate_leaves_tau_unchanged(
        times in prop::collection::vec((1e-9f64..1e-5, 1usize..4, any::<bool>()), 1..12),
        extra in 1e-9f64..1e-5,
        arity in 1usize..4,
    ) {
        let base: Vec<GateTimeEstimate> = times.iter().map(|&(t, n, v)| estimate(t, n, v)).collect();
        let mut grown = base.clone();
        grown.push(estimate(extra, arity, false));
        for n in 1..4 {
            let before = estimate_tau_n(&base, n).ok();
            let after = estimate_tau_n(&grown, n).unwrap_or(f64::NAN);
            match (n == arity, before) {
                (false, b) => prop_assert_eq!(b, estimate_tau_n(&grown, n).ok()),
                (true, None) => prop_assert_eq!(after, extra),
                (true, Some(b)) => {
                    prop_assert!(after <= b);
                    if extra >= b { prop_assert_eq!(after, b); } else { prop_assert_eq!(after, extra); }
                }
            }
        }
    }

    #[test]
    fn fit_is_order_independent(seed in any::<u64>()) {
        use rand::{seq::SliceRandom, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut data: Vec<(u64, f64)> = (0..8u64).map(|k| (k * 1000, 5.0 + k as f64 * 0.3 + (k % 3) as f64 * 0.1)).collect();
        let a = fit_gate_time("X q0", 1, &data, 10, 0).unwrap();
        data.shuffle(&mut rng);
        let b = fit_gate_time("X q0", 1, &data, 10, 0).unwrap();
        prop_assert!((a.t_gate - b.t_gate).abs() <= 1e-12 * a.t_gate.abs());
    }
}
