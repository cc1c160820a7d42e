use std::f64::consts::FRAC_PI_4;
use std::fmt;

use super::gate::{GateKind, GateOp};
use super::state::MAX_QUBITS;
use crate::error::{Error, Result};

/// Ordered list of gates over a fixed register. Every op is range-checked
/// on insertion, so a `Circuit` is always valid for its `num_qubits`.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    ops: Vec<GateOp>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::Capacity(format!(
                "{num_qubits} qubits requested, supported range is 1..={MAX_QUBITS}"
            )));
        }
        Ok(Self {
            num_qubits,
            ops: Vec::new(),
        })
    }

    pub fn from_ops(num_qubits: usize, ops: impl IntoIterator<Item = GateOp>) -> Result<Self> {
        let mut c = Self::new(num_qubits)?;
        for op in ops {
            c.push(op)?;
        }
        Ok(c)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn push(&mut self, op: GateOp) -> Result<&mut Self> {
        op.check_range(self.num_qubits)?;
        self.ops.push(op);
        Ok(self)
    }

    /// Append `other`, sending its qubit `i` to `qubit_map[i]`.
    pub fn append_mapped(&mut self, other: &Circuit, qubit_map: &[usize]) -> Result<&mut Self> {
        if qubit_map.len() != other.num_qubits {
            return Err(Error::shape(format!(
                "qubit map has {} entries for a {}-qubit circuit",
                qubit_map.len(),
                other.num_qubits
            )));
        }
        for op in &other.ops {
            self.push(op.remapped(|q| qubit_map[q]))?;
        }
        Ok(self)
    }

    /// Append `other` on the same register.
    pub fn append(&mut self, other: &Circuit) -> Result<&mut Self> {
        let identity: Vec<usize> = (0..other.num_qubits).collect();
        self.append_mapped(other, &identity)
    }

    /// Adjoint circuit: reversed order with every gate inverted.
    pub fn inverse(&self) -> Result<Circuit> {
        let mut ops = Vec::with_capacity(self.ops.len());
        for op in self.ops.iter().rev() {
            let inv = match op.kind() {
                GateKind::H | GateKind::X | GateKind::Cnot | GateKind::Cswap => op.clone(),
                GateKind::Ry
                | GateKind::Rz
                | GateKind::Phase
                | GateKind::Cphase
                | GateKind::Ccphase => {
                    GateOp::new(op.kind(), op.targets().to_vec(), vec![-op.angle()])?
                }
                // SX† is not in the gate set.
                GateKind::Sx => {
                    return Err(Error::argument("sx has no inverse within the gate set"));
                }
            };
            ops.push(inv);
        }
        Ok(Circuit {
            num_qubits: self.num_qubits,
            ops,
        })
    }

    /// Depth of the circuit as written (each gate occupies one layer on all
    /// of its qubits).
    pub fn depth(&self) -> usize {
        let mut level = vec![0usize; self.num_qubits];
        for op in &self.ops {
            let l = op.targets().iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
            for &q in op.targets() {
                level[q] = l;
            }
        }
        level.into_iter().max().unwrap_or(0)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "circuit on {} qubits, {} ops",
            self.num_qubits,
            self.ops.len()
        )?;
        for op in &self.ops {
            writeln!(f, "  {op}")?;
        }
        Ok(())
    }
}

/// Resource summary of a circuit after decomposition to CNOT + single-qubit gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GateReport {
    pub cnot_count: usize,
    pub single_qubit_count: usize,
    pub total_qubits: usize,
    pub depth: usize,
}

/// Rewrite `circuit` over {CNOT, single-qubit gates}. The result implements
/// the same unitary up to global phase.
pub fn decompose_to_basis(circuit: &Circuit) -> Result<Circuit> {
    let mut out = Circuit::new(circuit.num_qubits)?;
    for op in circuit.ops() {
        if op.params().iter().any(|p| !p.is_finite()) {
            return Err(Error::Decomposition(format!("{op} has a non-finite angle")));
        }
        let t = op.targets();
        match op.kind() {
            GateKind::H
            | GateKind::X
            | GateKind::Ry
            | GateKind::Rz
            | GateKind::Phase
            | GateKind::Sx
            | GateKind::Cnot => out.ops.push(op.clone()),
            GateKind::Cphase => push_cphase(&mut out.ops, t[0], t[1], op.angle()),
            GateKind::Ccphase => {
                let half = op.angle() / 2.0;
                let (c1, c2, tg) = (t[0], t[1], t[2]);
                push_cphase(&mut out.ops, c2, tg, half);
                out.ops.push(GateOp::cnot(c1, c2));
                push_cphase(&mut out.ops, c2, tg, -half);
                out.ops.push(GateOp::cnot(c1, c2));
                push_cphase(&mut out.ops, c1, tg, half);
            }
            GateKind::Cswap => {
                // Fredkin(c; a, b) = CNOT(b→a) · Toffoli(c, a → b) · CNOT(b→a)
                let (c, a, b) = (t[0], t[1], t[2]);
                out.ops.push(GateOp::cnot(b, a));
                push_toffoli(&mut out.ops, c, a, b);
                out.ops.push(GateOp::cnot(b, a));
            }
        }
    }
    Ok(out)
}

/// CP(θ) = P(θ/2)_c · CNOT · P(−θ/2)_t · CNOT · P(θ/2)_t
fn push_cphase(ops: &mut Vec<GateOp>, c: usize, t: usize, theta: f64) {
    let half = theta / 2.0;
    ops.push(GateOp::phase(t, half));
    ops.push(GateOp::cnot(c, t));
    ops.push(GateOp::phase(t, -half));
    ops.push(GateOp::cnot(c, t));
    ops.push(GateOp::phase(c, half));
}

/// Standard 6-CNOT Toffoli with T/T† phases.
fn push_toffoli(ops: &mut Vec<GateOp>, c1: usize, c2: usize, t: usize) {
    let tgate = |q| GateOp::phase(q, FRAC_PI_4);
    let tdg = |q| GateOp::phase(q, -FRAC_PI_4);
    ops.push(GateOp::h(t));
    ops.push(GateOp::cnot(c2, t));
    ops.push(tdg(t));
    ops.push(GateOp::cnot(c1, t));
    ops.push(tgate(t));
    ops.push(GateOp::cnot(c2, t));
    ops.push(tdg(t));
    ops.push(GateOp::cnot(c1, t));
    ops.push(tgate(c2));
    ops.push(tgate(t));
    ops.push(GateOp::h(t));
    ops.push(GateOp::cnot(c1, c2));
    ops.push(tgate(c1));
    ops.push(tdg(c2));
    ops.push(GateOp::cnot(c1, c2));
}

/// Count gates on the decomposed form of `circuit`.
pub fn gate_counts(circuit: &Circuit) -> Result<GateReport> {
    let basis = decompose_to_basis(circuit)?;
    let cnot_count = basis
        .ops()
        .iter()
        .filter(|op| op.kind() == GateKind::Cnot)
        .count();
    Ok(GateReport {
        cnot_count,
        single_qubit_count: basis.len() - cnot_count,
        total_qubits: basis.num_qubits(),
        depth: basis.depth(),
    })
}
