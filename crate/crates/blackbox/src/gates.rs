//! Standard gate unitaries and their embedding into multi-qubit registers.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use num_complex::Complex64;
use qslprobe_core::ComplexMatrix;

use crate::error::{BlackboxError, Result};

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);
const CI: Complex64 = Complex64::new(0.0, 1.0);

/// Every gate name the library knows, in canonical spelling.
pub const GATE_NAMES: [&str; 15] = [
    "X", "Y", "Z", "H", "S", "Sdg", "T", "Tdg", "SX", "CZ", "CNOT", "iSWAP", "Toffoli",
    "iToffoli", "CCZ",
];

/// Canonical spelling of a gate name; accepts a few common aliases.
pub fn canonical_name(name: &str) -> Option<&'static str> {
    let alias = match name {
        "CX" => "CNOT",
        "CCX" => "Toffoli",
        "ISWAP" => "iSWAP",
        other => other,
    };
    GATE_NAMES.iter().copied().find(|g| *g == alias)
}

fn diag(entries: &[Complex64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(entries.len(), |r, c| if r == c { entries[r] } else { C0 })
}

/// Identity with the last two basis states swapped and multiplied by `phase`.
fn controlled_flip(dim: usize, phase: Complex64) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |r, c| {
        if r < dim - 2 {
            if r == c { C1 } else { C0 }
        } else if c >= dim - 2 && r != c {
            phase
        } else {
            C0
        }
    })
}

/// Unitary and arity of a library gate. Multi-qubit gates list their
/// controls first and the target last.
pub fn gate_unitary(name: &str) -> Result<(ComplexMatrix, usize)> {
    let canonical = canonical_name(name).ok_or_else(|| BlackboxError::UnknownGate {
        name: name.to_string(),
        line: 0,
    })?;
    let t = Complex64::from_polar(1.0, FRAC_PI_4);
    let h = FRAC_1_SQRT_2;
    let u = match canonical {
        "X" => (ComplexMatrix::pauli_x(), 1),
        "Y" => (ComplexMatrix::pauli_y(), 1),
        "Z" => (ComplexMatrix::pauli_z(), 1),
        "H" => (
            ComplexMatrix::from_fn(2, |r, c| Complex64::new(if r == 1 && c == 1 { -h } else { h }, 0.0)),
            1,
        ),
        "S" => (diag(&[C1, CI]), 1),
        "Sdg" => (diag(&[C1, -CI]), 1),
        "T" => (diag(&[C1, t]), 1),
        "Tdg" => (diag(&[C1, t.conj()]), 1),
        "SX" => {
            let (a, b) = (Complex64::new(0.5, 0.5), Complex64::new(0.5, -0.5));
            (ComplexMatrix::from_fn(2, |r, c| if r == c { a } else { b }), 1)
        }
        "CZ" => (diag(&[C1, C1, C1, -C1]), 2),
        "CNOT" => (controlled_flip(4, C1), 2),
        "iSWAP" => (
            ComplexMatrix::from_fn(4, |r, c| match (r, c) {
                (0, 0) | (3, 3) => C1,
                (1, 2) | (2, 1) => CI,
                _ => C0,
            }),
            2,
        ),
        "Toffoli" => (controlled_flip(8, C1), 3),
        "iToffoli" => (controlled_flip(8, CI), 3),
        "CCZ" => (diag(&[C1, C1, C1, C1, C1, C1, C1, -C1]), 3),
        _ => unreachable!("GATE_NAMES and the match arms agree"),
    };
    Ok(u)
}

/// Lifts `u`, acting on the computational states of `targets` (in order),
/// to a register of `n` sites with `levels` levels each. Components with a
/// target site outside {0, 1} are left untouched. Site 0 is the most
/// significant digit of the basis index.
pub fn embed(u: &ComplexMatrix, targets: &[usize], n: usize, levels: usize) -> ComplexMatrix {
    let k = targets.len();
    debug_assert_eq!(u.dim(), 1 << k);
    let dim = levels.pow(n as u32);
    let place = |site: usize| levels.pow((n - 1 - site) as u32);
    let mut out = nalgebra::DMatrix::from_element(dim, dim, C0);
    for col in 0..dim {
        let digits: Vec<usize> = targets.iter().map(|&s| (col / place(s)) % levels).collect();
        if digits.iter().any(|&d| d > 1) {
            out[(col, col)] = C1;
            continue;
        }
        let local_col = digits.iter().fold(0, |acc, &d| acc * 2 + d);
        let base = col - targets.iter().zip(&digits).map(|(&s, &d)| d * place(s)).sum::<usize>();
        for local_row in 0..(1 << k) {
            let amp = u.get(local_row, local_col);
            if amp == C0 {
                continue;
            }
            let row = targets
                .iter()
                .enumerate()
                .map(|(i, &s)| ((local_row >> (k - 1 - i)) & 1) * place(s))
                .sum::<usize>()
                + base;
            out[(row, col)] = amp;
        }
    }
    ComplexMatrix::from_nalgebra(out).expect("embedding of a finite matrix is finite")
}

#[cfg(test)]
mod tests {
    use super::*;
    use qslprobe_core::{overlap, StateVector};

    #[test]
    fn all_library_gates_are_unitary() {
        for name in GATE_NAMES {
            let (u, arity) = gate_unitary(name).unwrap();
            assert_eq!(u.dim(), 1 << arity);
            assert!(u.unitarity_defect() < 1e-14, "{name}");
        }
    }

    #[test]
    fn unknown_gate() {
        assert!(matches!(gate_unitary("W"), Err(BlackboxError::UnknownGate { .. })));
        assert_eq!(canonical_name("CX"), Some("CNOT"));
    }

    #[test]
    fn z_orthogonalizes_plus() {
        let plus = StateVector::from_real(&[1.0, 1.0]).unwrap();
        let (z, _) = gate_unitary("Z").unwrap();
        let out = z.apply(&plus);
        assert!(overlap(&plus, &out).unwrap().norm() < 1e-15);
        let minus = StateVector::from_real(&[1.0, -1.0]).unwrap();
        assert!((overlap(&minus, &out).unwrap().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_and_three_qubit_actions() {
        let (cz, _) = gate_unitary("CZ").unwrap();
        assert_eq!(cz.apply(&StateVector::basis(4, 3).unwrap()).amplitude(3), -C1);
        let (cnot, _) = gate_unitary("CNOT").unwrap();
        assert_eq!(cnot.apply(&StateVector::basis(4, 2).unwrap()).amplitude(3), C1);
        let (isw, _) = gate_unitary("iSWAP").unwrap();
        assert_eq!(isw.apply(&StateVector::basis(4, 1).unwrap()).amplitude(2), CI);
        let (itof, _) = gate_unitary("iToffoli").unwrap();
        assert_eq!(itof.apply(&StateVector::basis(8, 6).unwrap()).amplitude(7), CI);
        assert_eq!(itof.apply(&StateVector::basis(8, 2).unwrap()).amplitude(2), C1);
        let (ccz, _) = gate_unitary("CCZ").unwrap();
        assert_eq!(ccz.apply(&StateVector::basis(8, 7).unwrap()).amplitude(7), -C1);
    }

    #[test]
    fn embedding_matches_kronecker_products() {
        let (x, _) = gate_unitary("X").unwrap();
        let id = ComplexMatrix::identity(2);
        let expected = id.kron(&x).kron(&id);
        assert!((&embed(&x, &[1], 3, 2) - &expected).frobenius_norm() < 1e-15);

        // CNOT with control 2 and target 0 on three qubits.
        let (cnot, _) = gate_unitary("CNOT").unwrap();
        let e = embed(&cnot, &[2, 0], 3, 2);
        // |001⟩ (q2 = 1) → |101⟩
        assert_eq!(e.apply(&StateVector::basis(8, 1).unwrap()).amplitude(5), C1);
        assert!(e.unitarity_defect() < 1e-14);
    }

    #[test]
    fn three_level_embedding_leaves_leakage_alone() {
        let (x, _) = gate_unitary("X").unwrap();
        let e = embed(&x, &[0], 1, 3);
        assert_eq!(e.get(1, 0), C1);
        assert_eq!(e.get(0, 1), C1);
        assert_eq!(e.get(2, 2), C1);
        let (cz, _) = gate_unitary("CZ").unwrap();
        let e = embed(&cz, &[0, 1], 2, 3);
        assert_eq!(e.dim(), 9);
        // |11⟩ is index 4 in base 3
        assert_eq!(e.get(4, 4), -C1);
        assert_eq!(e.get(8, 8), C1);
    }
}
