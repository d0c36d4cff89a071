//! Circuit text format.
//!
//! ```text
//! qubits 2
//! H q0; CNOT q0 q1   # statements split on newlines or `;`
//! repeat 1000 {
//!     X q1
//! }
//! ```

use std::fmt;

use crate::error::{BlackboxError, Result};
use crate::gates::{canonical_name, gate_unitary};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instruction {
    pub gate: String,
    pub qubits: Vec<usize>,
    /// Source line, 0 when built in code.
    pub line: usize,
}

/// A run of instructions applied `repeat` times in a row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub body: Vec<Instruction>,
    pub repeat: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    n_qubits: usize,
    blocks: Vec<Block>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, blocks: Vec::new() }
    }

    /// `gate` on `qubits`, repeated `repeat` times.
    pub fn repeated(gate: &str, qubits: &[usize], repeat: u64) -> Result<Self> {
        let n = qubits.iter().max().map_or(1, |m| m + 1);
        let mut c = Self::new(n);
        c.push_block(&[(gate, qubits)], repeat)?;
        Ok(c)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn push(&mut self, gate: &str, qubits: &[usize]) -> Result<&mut Self> {
        self.push_block(&[(gate, qubits)], 1)
    }

    /// Appends a block. A repeat count of 0 adds nothing.
    pub fn push_block(&mut self, body: &[(&str, &[usize])], repeat: u64) -> Result<&mut Self> {
        let body = body
            .iter()
            .map(|(g, q)| self.instruction(g, q.to_vec(), 0))
            .collect::<Result<Vec<_>>>()?;
        if repeat > 0 && !body.is_empty() {
            self.blocks.push(Block { body, repeat });
        }
        Ok(self)
    }

    fn instruction(&self, gate: &str, qubits: Vec<usize>, line: usize) -> Result<Instruction> {
        let name = canonical_name(gate).ok_or_else(|| BlackboxError::UnknownGate {
            name: gate.to_string(),
            line,
        })?;
        let (_, arity) = gate_unitary(name)?;
        if qubits.len() != arity {
            return Err(BlackboxError::SyntaxError {
                line,
                message: format!("{name} acts on {arity} qubit(s), got {}", qubits.len()),
            });
        }
        if let Some(&index) = qubits.iter().find(|&&q| q >= self.n_qubits) {
            return Err(BlackboxError::BadIndex { index, qubits: self.n_qubits, line });
        }
        for (i, q) in qubits.iter().enumerate() {
            if qubits[..i].contains(q) {
                return Err(BlackboxError::SyntaxError {
                    line,
                    message: format!("qubit q{q} used twice in {name}"),
                });
            }
        }
        Ok(Instruction { gate: name.to_string(), qubits, line })
    }

    /// Number of gate applications, counting repeats.
    pub fn gate_count(&self) -> u64 {
        self.blocks.iter().map(|b| b.repeat * b.body.len() as u64).sum()
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.n_qubits)?;
        let line = |i: &Instruction| {
            let qs: Vec<String> = i.qubits.iter().map(|q| format!("q{q}")).collect();
            format!("{} {}", i.gate, qs.join(" "))
        };
        for b in &self.blocks {
            if b.repeat == 1 {
                for i in &b.body {
                    writeln!(f, "{}", line(i))?;
                }
            } else {
                let body: Vec<String> = b.body.iter().map(line).collect();
                writeln!(f, "repeat {} {{ {} }}", b.repeat, body.join("; "))?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Word(String),
    Open,
    Close,
    End,
}

fn tokenize(text: &str) -> Vec<(Token, usize)> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let code = raw.split('#').next().unwrap_or("");
        let mut word = String::new();
        let flush = |word: &mut String, out: &mut Vec<(Token, usize)>| {
            if !word.is_empty() {
                out.push((Token::Word(std::mem::take(word)), line));
            }
        };
        for ch in code.chars() {
            match ch {
                '{' | '}' | ';' => {
                    flush(&mut word, &mut out);
                    out.push((
                        match ch {
                            '{' => Token::Open,
                            '}' => Token::Close,
                            _ => Token::End,
                        },
                        line,
                    ));
                }
                c if c.is_whitespace() => flush(&mut word, &mut out),
                c => word.push(c),
            }
        }
        flush(&mut word, &mut out);
        out.push((Token::End, line));
    }
    out
}

fn syntax(line: usize, message: impl Into<String>) -> BlackboxError {
    BlackboxError::SyntaxError { line, message: message.into() }
}

fn parse_qubit(word: &str, line: usize) -> Result<usize> {
    word.strip_prefix('q')
        .and_then(|d| d.parse().ok())
        .ok_or_else(|| syntax(line, format!("expected a qubit like q0, got `{word}`")))
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let tokens = tokenize(text);
    let mut circuit: Option<Circuit> = None;
    // (repeat count, body, opening line) while inside a repeat block
    let mut open: Option<(u64, Vec<Instruction>, usize)> = None;
    let mut pos = 0;

    while pos < tokens.len() {
        let (tok, line) = tokens[pos].clone();
        pos += 1;
        // collect one statement: words up to End / brace
        let mut words = Vec::new();
        let mut terminator = tok.clone();
        if let Token::Word(w) = tok {
            words.push(w);
            terminator = Token::End;
            while pos < tokens.len() {
                match &tokens[pos].0 {
                    Token::Word(w) => {
                        words.push(w.clone());
                        pos += 1;
                    }
                    t => {
                        terminator = t.clone();
                        pos += 1;
                        break;
                    }
                }
            }
        }

        if !words.is_empty() {
            let head = words[0].as_str();
            match head {
                "qubits" => {
                    if circuit.is_some() {
                        return Err(syntax(line, "qubits declared twice"));
                    }
                    let n = match words.as_slice() {
                        [_, n] => n.parse::<usize>().ok().filter(|&n| n > 0),
                        _ => None,
                    };
                    let n = n.ok_or_else(|| syntax(line, "expected `qubits <n>` with n ≥ 1"))?;
                    circuit = Some(Circuit::new(n));
                }
                "repeat" => {
                    if open.is_some() {
                        return Err(syntax(line, "repeat blocks cannot be nested"));
                    }
                    if terminator != Token::Open || words.len() != 2 {
                        return Err(syntax(line, "expected `repeat <m> {`"));
                    }
                    let m = words[1]
                        .parse::<u64>()
                        .ok()
                        .filter(|&m| m >= 1)
                        .ok_or_else(|| syntax(line, "repeat count must be an integer ≥ 1"))?;
                    if circuit.is_none() {
                        return Err(syntax(line, "`qubits <n>` must come first"));
                    }
                    open = Some((m, Vec::new(), line));
                    continue;
                }
                gate => {
                    let c = circuit
                        .as_ref()
                        .ok_or_else(|| syntax(line, "`qubits <n>` must come first"))?;
                    if canonical_name(gate).is_none() {
                        return Err(BlackboxError::UnknownGate { name: gate.to_string(), line });
                    }
                    let qubits = words[1..]
                        .iter()
                        .map(|w| parse_qubit(w, line))
                        .collect::<Result<Vec<_>>>()?;
                    let ins = c.instruction(gate, qubits, line)?;
                    match open.as_mut() {
                        Some((_, body, _)) => body.push(ins),
                        None => circuit
                            .as_mut()
                            .expect("checked above")
                            .blocks
                            .push(Block { body: vec![ins], repeat: 1 }),
                    }
                }
            }
        }

        match terminator {
            Token::End | Token::Word(_) => {}
            Token::Open => return Err(syntax(line, "unexpected `{`")),
            Token::Close => {
                let (repeat, body, start) =
                    open.take().ok_or_else(|| syntax(line, "unmatched `}`"))?;
                if body.is_empty() {
                    return Err(syntax(start, "empty repeat block"));
                }
                circuit.as_mut().expect("repeat needs qubits").blocks.push(Block { body, repeat });
            }
        }
    }
    if let Some((_, _, start)) = open {
        return Err(syntax(start, "repeat block is never closed"));
    }
    circuit.ok_or_else(|| syntax(1, "missing `qubits <n>`"))
}
