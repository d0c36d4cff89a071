//! Command implementations behind the `qslprobe` binary.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use qslprobe_blackbox::{
    gate_unitary, load_device, BlackboxError, DeviceModel, DEFAULT_DEVICE_CONFIG, DEFAULT_DEVICE_FILE,
};
use qslprobe_core::verify::{
    error_correction_suite, magnus_suite, qsl_suite, SuiteReport, DEFAULT_STEPS, MAGNUS_STEPS,
};
use qslprobe_estimator::{
    all_qubit_choices, estimate_gates, fit_run, report, run_amplification, AmplificationPlan,
    AmplificationRun, EstimationSettings, EstimatorError, ExperimentStore, GateRequest,
    GateTimeEstimate, Report,
};

pub const DEFAULT_SEED: u64 = 2024;
/// Gates of the representative single-, two- and three-qubit sets.
pub const DEFAULT_GATES: [&str; 9] = ["X", "Y", "Z", "CZ", "CNOT", "iSWAP", "Toffoli", "iToffoli", "CCZ"];
/// X-gate amplification sweep: 0 to 5e5 in steps of 1e5.
pub const DEFAULT_AMPLIFY_NGATE: [u64; 6] = [0, 100_000, 200_000, 300_000, 400_000, 500_000];
/// Gate-set sweep. Long enough that even a 32 ns gate moves t_exec by
/// 64 s between points, so 1 s reporting resolution is negligible.
pub const DEFAULT_ESTIMATE_NGATE: [u64; 6] = [0, 2_000_000, 4_000_000, 6_000_000, 8_000_000, 10_000_000];
pub const DEFAULT_SHOTS: u64 = 1000;
pub const STORE_FILE: &str = "experiment.csv";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Device(#[from] BlackboxError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error(transparent)]
    Core(#[from] qslprobe_core::Error),
    #[error("verification failed: {0} violation(s)")]
    VerificationFailed(usize),
}

impl CliError {
    /// 1 usage, 2 verification failure, 3 backend or data error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Estimator(EstimatorError::InvalidPlan(_)) => 1,
            CliError::Core(qslprobe_core::Error::InvalidArgument(_)) => 1,
            CliError::VerificationFailed(_) => 2,
            _ => 3,
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "qslprobe", version, about = "Speed-limit energy estimates from job execution times")]
pub struct Cli {
    /// Device config file (defaults to the built-in device).
    #[arg(long, global = true)]
    pub device: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = "QSLPROBE_OUT", default_value = ".")]
    pub out: PathBuf,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the default device config.
    DeviceInit {
        #[arg(long)]
        force: bool,
    },
    /// Gate-time amplification for one gate.
    Amplify(AmplifyArgs),
    /// Amplification, regression and energy estimates for a gate set.
    Estimate(EstimateArgs),
    /// Randomized property suites.
    Verify {
        kind: VerifyKind,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

#[derive(Debug, Clone, Args)]
pub struct AmplifyArgs {
    /// Gate, optionally with qubits: `X`, `CZ q1 q2`.
    #[arg(long, default_value = "X")]
    pub gate: String,
    #[arg(long, default_value_t = DEFAULT_SHOTS)]
    pub shots: u64,
    /// Comma-separated repetition counts.
    #[arg(long, value_delimiter = ',')]
    pub ngate: Option<Vec<u64>>,
    #[arg(long)]
    pub threshold: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct EstimateArgs {
    /// Comma-separated gate names.
    #[arg(long, value_delimiter = ',')]
    pub gate: Option<Vec<String>>,
    #[arg(long, default_value_t = DEFAULT_SHOTS)]
    pub shots: u64,
    #[arg(long, value_delimiter = ',')]
    pub ngate: Option<Vec<u64>>,
    #[arg(long)]
    pub threshold: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyKind {
    Qsl,
    Magnus,
    ErrorCorrection,
}

impl VerifyKind {
    fn name(self) -> &'static str {
        match self {
            VerifyKind::Qsl => "qsl",
            VerifyKind::Magnus => "magnus",
            VerifyKind::ErrorCorrection => "error-correction",
        }
    }
}

pub fn load_device_or_default(path: Option<&Path>) -> Result<DeviceModel> {
    match path {
        None => Ok(DeviceModel::default_device()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| io_err(p, e))?;
            Ok(load_device(&text)?)
        }
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

/// Writes the default config to `path` (a file, or a directory that gets
/// `ibm-torino-like.cfg`). Refuses to overwrite unless `force`.
pub fn cmd_device_init(path: &Path, force: bool) -> Result<PathBuf> {
    let target = if path.is_dir() { path.join(DEFAULT_DEVICE_FILE) } else { path.to_path_buf() };
    if target.exists() && !force {
        return Err(CliError::Io(format!(
            "{} exists; use --force to overwrite",
            target.display()
        )));
    }
    if let Some(parent) = target.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    write(&target, DEFAULT_DEVICE_CONFIG)?;
    Ok(target)
}

/// `X`, `CZ q1 q2` → (gate, qubits). Qubits default to 0, 1, … .
pub fn parse_gate_spec(spec: &str) -> Result<(String, Vec<usize>)> {
    let mut words = spec.split_whitespace();
    let gate = words.next().ok_or_else(|| CliError::Usage("empty gate".into()))?.to_string();
    let qubits = words
        .map(|w| {
            w.strip_prefix('q')
                .and_then(|d| d.parse().ok())
                .ok_or_else(|| CliError::Usage(format!("bad qubit `{w}`")))
        })
        .collect::<Result<Vec<usize>>>()?;
    let (_, arity) = gate_unitary(&gate)?;
    if qubits.is_empty() {
        return Ok((gate, (0..arity).collect()));
    }
    if qubits.len() != arity {
        return Err(CliError::Usage(format!("{gate} takes {arity} qubit(s)")));
    }
    Ok((gate, qubits))
}

#[derive(Debug)]
pub struct AmplifyOutput {
    pub csv_path: PathBuf,
    pub run: AmplificationRun,
    /// None when the points do not support a fit.
    pub estimate: Option<GateTimeEstimate>,
    pub fit_error: Option<EstimatorError>,
}

/// Runs one amplification plan and writes `amplify_<gate>_<qubits>.csv`
/// (n_gate, t_exec_seconds) plus the raw experiment store.
pub fn cmd_amplify(device: &DeviceModel, args: &AmplifyArgs, seed: u64, out: &Path) -> Result<AmplifyOutput> {
    let (gate, qubits) = parse_gate_spec(&args.gate)?;
    let values = args.ngate.clone().unwrap_or_else(|| DEFAULT_AMPLIFY_NGATE.to_vec());
    let mut plan = AmplificationPlan::new(&gate, &qubits, values, args.shots, seed);
    plan.threshold = args.threshold;
    ensure_dir(out)?;
    let mut store = ExperimentStore::open(out.join(STORE_FILE))?;
    let run = run_amplification(device, &plan, Some(&mut store))?;

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n_gate", "t_exec_seconds"]).map_err(|e| CliError::Io(e.to_string()))?;
    for (n, t) in &run.points {
        w.write_record([n.to_string(), format!("{t}")]).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    let name = std::iter::once(gate.clone())
        .chain(qubits.iter().map(|q| format!("q{q}")))
        .collect::<Vec<_>>()
        .join("_");
    let csv_path = out.join(format!("amplify_{name}.csv"));
    write(&csv_path, &String::from_utf8(bytes).expect("utf-8"))?;

    let (estimate, fit_error) = match fit_run(&run) {
        Ok(e) => (Some(e), None),
        Err(e) => (None, Some(e)),
    };
    Ok(AmplifyOutput { csv_path, run, estimate, fit_error })
}

#[derive(Debug)]
pub struct EstimateOutput {
    pub report: Report,
    pub estimates: Vec<GateTimeEstimate>,
    pub skipped: Vec<(String, String)>,
    pub report_path: PathBuf,
}

/// Amplifies every listed gate on every connected qubit choice, then
/// writes `report.txt`, `gates.csv`, `energies.csv` and the raw store.
pub fn cmd_estimate(device: &DeviceModel, args: &EstimateArgs, seed: u64, out: &Path) -> Result<EstimateOutput> {
    let gates: Vec<String> = args
        .gate
        .clone()
        .unwrap_or_else(|| DEFAULT_GATES.iter().map(|g| g.to_string()).collect());
    if gates.is_empty() {
        return Err(CliError::Usage("no gates given".into()));
    }
    let requests: Vec<GateRequest> = all_qubit_choices(&gates, device.num_qubits())?;
    let settings = EstimationSettings {
        n_gate_values: args.ngate.clone().unwrap_or_else(|| DEFAULT_ESTIMATE_NGATE.to_vec()),
        n_shots: args.shots,
        seed,
        threshold: args.threshold,
    };
    ensure_dir(out)?;
    let mut store = ExperimentStore::open(out.join(STORE_FILE))?;
    let est = estimate_gates(device, &requests, &settings, Some(&mut store))?;
    if est.energies.is_empty() {
        let arity = requests.iter().map(|r| r.qubits.len()).min().unwrap_or(1);
        return Err(EstimatorError::NoPhysicalGate { arity }.into());
    }
    let rep = report(&est.estimates, &est.energies);
    let report_path = out.join("report.txt");
    write(&report_path, &rep.table())?;
    write(&out.join("gates.csv"), &rep.gates_csv())?;
    write(&out.join("energies.csv"), &rep.energies_csv())?;
    Ok(EstimateOutput { report: rep, estimates: est.estimates, skipped: est.skipped, report_path })
}

/// Runs a property suite and writes `verify_<kind>.txt`. A failing suite is
/// still returned; callers map it to the verification exit code.
pub fn cmd_verify(kind: VerifyKind, trials: usize, seed: u64, out: &Path) -> Result<SuiteReport> {
    if trials == 0 {
        return Err(CliError::Usage("trials must be at least 1".into()));
    }
    let rep = match kind {
        VerifyKind::Qsl => qsl_suite(trials, seed, DEFAULT_STEPS)?,
        VerifyKind::Magnus => magnus_suite(trials, seed, MAGNUS_STEPS)?,
        VerifyKind::ErrorCorrection => error_correction_suite(trials, seed, DEFAULT_STEPS)?,
    };
    ensure_dir(out)?;
    write(&out.join(format!("verify_{}.txt", kind.name())), &rep.render())?;
    Ok(rep)
}

/// Parses `args` and runs the command, printing to stdout. Returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::DeviceInit { force } => {
            let target = cli.device.clone().unwrap_or_else(|| cli.out.join(DEFAULT_DEVICE_FILE));
            let path = cmd_device_init(&target, *force)?;
            println!("wrote {}", path.display());
        }
        Command::Amplify(args) => {
            let device = load_device_or_default(cli.device.as_deref())?;
            let o = cmd_amplify(&device, args, cli.seed, &cli.out)?;
            for (n, msg) in &o.run.failures {
                eprintln!("n_gate {n}: {msg}");
            }
            println!("wrote {}", o.csv_path.display());
            match (&o.estimate, &o.fit_error) {
                (Some(e), _) if e.is_virtual => {
                    println!("{}: slope not significant (virtual gate)", e.gate)
                }
                (Some(e), _) => println!(
                    "{}: t_gate = {:.2} ± {:.2} ns over {} points (n_gate ≥ {}), r² = {:.6}",
                    e.gate,
                    e.t_gate * 1e9,
                    e.t_gate_stderr * 1e9,
                    e.fit.points_used,
                    e.fit.threshold_used,
                    e.fit.r_squared
                ),
                (None, Some(err)) => println!("no fit: {err}"),
                (None, None) => {}
            }
        }
        Command::Estimate(args) => {
            let device = load_device_or_default(cli.device.as_deref())?;
            let o = cmd_estimate(&device, args, cli.seed, &cli.out)?;
            for (label, reason) in &o.skipped {
                eprintln!("skipped {label}: {reason}");
            }
            print!("{}", o.report.table());
            println!("wrote {}", o.report_path.display());
        }
        Command::Verify { kind, trials } => {
            let rep = cmd_verify(*kind, *trials, cli.seed, &cli.out)?;
            print!("{}", rep.render());
            if !rep.passed() {
                return Err(CliError::VerificationFailed(rep.violations().max(1)));
            }
        }
    }
    Ok(())
}
