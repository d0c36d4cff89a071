//! Table and CSV output.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::energy::EnergyEstimate;
use crate::fit::GateTimeEstimate;

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    /// One estimate per gate: the fastest over its qubit choices.
    pub rows: Vec<GateTimeEstimate>,
    pub energies: Vec<EnergyEstimate>,
}

fn gate_name(label: &str) -> &str {
    label.split_whitespace().next().unwrap_or(label)
}

fn qubits_of(label: &str) -> String {
    label.split_whitespace().skip(1).collect::<Vec<_>>().join(" ")
}

/// Collapses per-qubit-choice estimates to the shortest time per gate,
/// keeping first-seen gate order. Virtual gates stay virtual only if every
/// choice is virtual.
pub fn report(estimates: &[GateTimeEstimate], energies: &[EnergyEstimate]) -> Report {
    let mut order: Vec<&str> = Vec::new();
    let mut best: BTreeMap<&str, &GateTimeEstimate> = BTreeMap::new();
    for e in estimates {
        let name = gate_name(&e.gate);
        match best.get(name) {
            None => {
                order.push(name);
                best.insert(name, e);
            }
            Some(cur) => {
                let better = match (cur.is_virtual, e.is_virtual) {
                    (true, false) => true,
                    (false, true) => false,
                    _ => e.t_gate < cur.t_gate,
                };
                if better {
                    best.insert(name, e);
                }
            }
        }
    }
    Report {
        rows: order.iter().map(|n| best[n].clone()).collect(),
        energies: energies.to_vec(),
    }
}

impl Report {
    pub fn energy(&self, arity: usize) -> Option<&EnergyEstimate> {
        self.energies.iter().find(|e| e.arity == arity)
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<10} {:<10} {:>5} {:>12} {:>11} {:>11} {:>11} {:>11}",
            "gate", "qubits", "arity", "t_gate[ns]", "stderr[ns]", "tau_n[ns]", "E_lo[J]", "dE_lo[J]"
        );
        for r in &self.rows {
            let (t, se) = if r.is_virtual {
                ("virtual".to_string(), "-".to_string())
            } else {
                (format!("{:.1}", r.t_gate * 1e9), format!("{:.2}", r.t_gate_stderr * 1e9))
            };
            let (tau, e, de) = match self.energy(r.arity) {
                Some(en) => (
                    format!("{:.1}", en.tau_n * 1e9),
                    format!("{:.1e}", en.e_lower.joules()),
                    format!("{:.1e}", en.delta_e_lower.joules()),
                ),
                None => ("no physical gate".to_string(), String::new(), String::new()),
            };
            let _ = writeln!(
                out,
                "{:<10} {:<10} {:>5} {:>12} {:>11} {:>11} {:>11} {:>11}",
                gate_name(&r.gate),
                qubits_of(&r.gate),
                r.arity,
                t,
                se,
                tau,
                e,
                de
            );
        }
        out
    }

    /// Gate-time rows as CSV.
    pub fn gates_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "gate", "qubits", "arity", "t_gate_seconds", "t_gate_stderr_seconds", "is_virtual",
            "slope", "intercept", "r_squared", "points_used", "threshold_used",
        ])
        .expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                gate_name(&r.gate).to_string(),
                qubits_of(&r.gate),
                r.arity.to_string(),
                format!("{:e}", r.t_gate),
                format!("{:e}", r.t_gate_stderr),
                r.is_virtual.to_string(),
                format!("{:e}", r.fit.slope),
                format!("{}", r.fit.intercept),
                format!("{}", r.fit.r_squared),
                r.fit.points_used.to_string(),
                r.fit.threshold_used.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    /// One row per arity.
    pub fn energies_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "arity", "tau_n_seconds", "e_lower_joules", "delta_e_lower_joules", "e_band_low_joules",
            "e_band_high_joules",
        ])
        .expect("in-memory write");
        for e in &self.energies {
            let (lo, hi) = e.band.map_or((String::new(), String::new()), |(l, h)| {
                (format!("{:e}", l.joules()), format!("{:e}", h.joules()))
            });
            w.write_record([
                e.arity.to_string(),
                format!("{:e}", e.tau_n),
                format!("{:e}", e.e_lower.joules()),
                format!("{:e}", e.delta_e_lower.joules()),
                lo,
                hi,
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}
