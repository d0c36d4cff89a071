use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qslprobe(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qslprobe"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("QSLPROBE_OUT")
        .output()
        .expect("binary runs")
}

// default device with the timing noise switched off
fn quiet_device(dir: &Path) -> String {
    let path = dir.join("quiet.cfg");
    let text = qslprobe_blackbox::DEFAULT_DEVICE_CONFIG.replace("jitter_stddev = 0.5", "jitter_stddev = 0.0");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn device_init_force_contract() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&qslprobe(dir.path(), &["device-init"])), 0);
    let cfg = dir.path().join("ibm-torino-like.cfg");
    assert!(cfg.exists());
    assert_eq!(code(&qslprobe(dir.path(), &["device-init"])), 3);
    assert_eq!(code(&qslprobe(dir.path(), &["device-init", "--force"])), 0);
    // the written file loads as a device
    let o = qslprobe(dir.path(), &["--device", cfg.to_str().unwrap(), "estimate", "--gate", "X"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn amplify_is_byte_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let o = qslprobe(dir.path(), &["--seed", "17", "amplify", "--gate", "X"]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    for file in ["amplify_X_q0.csv", "experiment.csv"] {
        let x = fs::read(a.path().join(file)).unwrap();
        assert_eq!(x, fs::read(b.path().join(file)).unwrap(), "{file}");
    }
    let rows = fs::read_to_string(a.path().join("amplify_X_q0.csv")).unwrap();
    assert_eq!(rows.lines().next(), Some("n_gate,t_exec_seconds"));
    assert_eq!(rows.lines().count(), 7);
}

#[test]
fn out_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_qslprobe"))
        .args(["amplify", "--gate", "CZ q1 q2", "--ngate", "0,10,20,30,40"])
        .env("QSLPROBE_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("amplify_CZ_q1_q2.csv").exists());
}

#[test]
fn error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&qslprobe(dir.path(), &["amplify", "--gate", "W"])), 3);
    assert_eq!(code(&qslprobe(dir.path(), &["amplify", "--shots", "0"])), 3);
    assert_eq!(code(&qslprobe(dir.path(), &["amplify", "--bogus"])), 1);
    assert_eq!(code(&qslprobe(dir.path(), &["amplify", "--ngate", "5,1,3,4"])), 1);
    let quiet = quiet_device(dir.path());
    assert_eq!(code(&qslprobe(dir.path(), &["--device", &quiet, "estimate", "--gate", "Z"])), 3);
    assert_eq!(code(&qslprobe(dir.path(), &["verify", "qsl", "--trials", "0"])), 1);
    assert_eq!(code(&qslprobe(dir.path(), &["verify", "nonsense"])), 1);
    assert_eq!(code(&qslprobe(dir.path(), &["--device", "/no/such/file", "amplify"])), 3);
    assert_eq!(code(&qslprobe(dir.path(), &["--help"])), 0);
}

#[test]
fn verify_suites_pass_small() {
    let dir = tempfile::tempdir().unwrap();
    for kind in ["qsl", "magnus", "error-correction"] {
        let o = qslprobe(dir.path(), &["verify", kind, "--trials", "4"]);
        let stdout = String::from_utf8_lossy(&o.stdout);
        assert_eq!(code(&o), 0, "{kind}: {stdout}");
        assert!(stdout.trim_end().ends_with("PASS"));
        assert!(dir.path().join(format!("verify_{kind}.txt")).exists());
    }
}

#[test]
fn estimate_single_gate_report() {
    let dir = tempfile::tempdir().unwrap();
    let quiet = quiet_device(dir.path());
    let o = qslprobe(dir.path(), &["--device", &quiet, "estimate", "--gate", "CNOT"]);
    assert_eq!(code(&o), 0);
    let report = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert_eq!(report.lines().count(), 2);
    assert!(report.contains("140.0"));
    let energies = fs::read_to_string(dir.path().join("energies.csv")).unwrap();
    assert_eq!(energies.lines().count(), 2);
}
