use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Supported gate kinds.
///
/// Target conventions for multi-qubit kinds:
/// `Cnot` is `[control, target]`, `Cphase` is `[control, target]`
/// (symmetric anyway), `Cswap` is `[control, a, b]` and `Ccphase` is
/// `[control1, control2, target]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    H,
    X,
    Ry,
    Rz,
    Phase,
    Sx,
    Cnot,
    Cphase,
    Cswap,
    Ccphase,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::H
            | GateKind::X
            | GateKind::Ry
            | GateKind::Rz
            | GateKind::Phase
            | GateKind::Sx => 1,
            GateKind::Cnot | GateKind::Cphase => 2,
            GateKind::Cswap | GateKind::Ccphase => 3,
        }
    }

    pub fn num_params(self) -> usize {
        match self {
            GateKind::Ry
            | GateKind::Rz
            | GateKind::Phase
            | GateKind::Cphase
            | GateKind::Ccphase => 1,
            _ => 0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::Phase => "p",
            GateKind::Sx => "sx",
            GateKind::Cnot => "cx",
            GateKind::Cphase => "cp",
            GateKind::Cswap => "cswap",
            GateKind::Ccphase => "ccp",
        }
    }
}

/// One gate application. Construction validates arity, parameter count
/// and distinctness of targets; range against a register is checked when
/// the op is pushed into a circuit or applied to a state.
#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    kind: GateKind,
    targets: Vec<usize>,
    params: Vec<f64>,
}

impl GateOp {
    pub fn new(kind: GateKind, targets: Vec<usize>, params: Vec<f64>) -> Result<Self> {
        if targets.len() != kind.arity() {
            return Err(Error::argument(format!(
                "{} takes {} qubit(s), got {}",
                kind.name(),
                kind.arity(),
                targets.len()
            )));
        }
        if params.len() != kind.num_params() {
            return Err(Error::argument(format!(
                "{} takes {} parameter(s), got {}",
                kind.name(),
                kind.num_params(),
                params.len()
            )));
        }
        for (i, q) in targets.iter().enumerate() {
            if targets[..i].contains(q) {
                return Err(Error::argument(format!(
                    "{} applied to repeated qubit {q}",
                    kind.name()
                )));
            }
        }
        Ok(Self {
            kind,
            targets,
            params,
        })
    }

    // Infallible shorthands for the fixed-shape gates. They panic only on
    // repeated qubits, which is a programming error at the call site.

    pub fn h(q: usize) -> Self {
        Self::one(GateKind::H, q, None)
    }

    pub fn x(q: usize) -> Self {
        Self::one(GateKind::X, q, None)
    }

    pub fn sx(q: usize) -> Self {
        Self::one(GateKind::Sx, q, None)
    }

    pub fn ry(q: usize, theta: f64) -> Self {
        Self::one(GateKind::Ry, q, Some(theta))
    }

    pub fn rz(q: usize, theta: f64) -> Self {
        Self::one(GateKind::Rz, q, Some(theta))
    }

    pub fn phase(q: usize, theta: f64) -> Self {
        Self::one(GateKind::Phase, q, Some(theta))
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::new(GateKind::Cnot, vec![control, target], vec![]).expect("cnot on distinct qubits")
    }

    pub fn cphase(control: usize, target: usize, theta: f64) -> Self {
        Self::new(GateKind::Cphase, vec![control, target], vec![theta])
            .expect("cphase on distinct qubits")
    }

    pub fn cswap(control: usize, a: usize, b: usize) -> Self {
        Self::new(GateKind::Cswap, vec![control, a, b], vec![]).expect("cswap on distinct qubits")
    }

    pub fn ccphase(c1: usize, c2: usize, target: usize, theta: f64) -> Self {
        Self::new(GateKind::Ccphase, vec![c1, c2, target], vec![theta])
            .expect("ccphase on distinct qubits")
    }

    fn one(kind: GateKind, q: usize, theta: Option<f64>) -> Self {
        Self {
            kind,
            targets: vec![q],
            params: theta.into_iter().collect(),
        }
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn angle(&self) -> f64 {
        self.params.first().copied().unwrap_or(0.0)
    }

    pub fn is_single_qubit(&self) -> bool {
        self.kind.arity() == 1
    }

    pub fn check_range(&self, num_qubits: usize) -> Result<()> {
        match self.targets.iter().find(|&&q| q >= num_qubits) {
            Some(&index) => Err(Error::Index { index, num_qubits }),
            None => Ok(()),
        }
    }

    /// The same gate with every qubit index passed through `map`.
    pub fn remapped(&self, map: impl Fn(usize) -> usize) -> Self {
        Self {
            kind: self.kind,
            targets: self.targets.iter().map(|&q| map(q)).collect(),
            params: self.params.clone(),
        }
    }

    /// Dense local matrix in the basis of `targets`, where `targets[0]` is
    /// the least significant bit of the local index.
    pub fn local_matrix(&self) -> Vec<Vec<Complex64>> {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let theta = self.angle();
        match self.kind {
            GateKind::H => {
                let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
                vec![vec![h, h], vec![h, -h]]
            }
            GateKind::X => vec![vec![zero, one], vec![one, zero]],
            GateKind::Ry => {
                let (s, c) = (theta / 2.0).sin_cos();
                vec![
                    vec![Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
                    vec![Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
                ]
            }
            GateKind::Rz => vec![
                vec![Complex64::from_polar(1.0, -theta / 2.0), zero],
                vec![zero, Complex64::from_polar(1.0, theta / 2.0)],
            ],
            GateKind::Phase => vec![
                vec![one, zero],
                vec![zero, Complex64::from_polar(1.0, theta)],
            ],
            GateKind::Sx => {
                let a = Complex64::new(0.5, 0.5);
                let b = Complex64::new(0.5, -0.5);
                vec![vec![a, b], vec![b, a]]
            }
            _ => {
                let dim = 1usize << self.kind.arity();
                let mut m = vec![vec![zero; dim]; dim];
                (0..dim).for_each(|col| {
                    let (row, phase) = self.permute_basis(col);
                    m[row][col] = phase;
                });
                m
            }
        }
    }

    /// Image of a local basis index under a multi-qubit permutation/phase
    /// gate (all multi-qubit kinds here are monomial matrices).
    fn permute_basis(&self, idx: usize) -> (usize, Complex64) {
        let one = Complex64::new(1.0, 0.0);
        let bit = |i: usize| (idx >> i) & 1;
        match self.kind {
            GateKind::Cnot => (if bit(0) == 1 { idx ^ 0b10 } else { idx }, one),
            GateKind::Cphase => {
                let ph = if idx == 0b11 {
                    Complex64::from_polar(1.0, self.angle())
                } else {
                    one
                };
                (idx, ph)
            }
            GateKind::Cswap => {
                if bit(0) == 1 && bit(1) != bit(2) {
                    (idx ^ 0b110, one)
                } else {
                    (idx, one)
                }
            }
            GateKind::Ccphase => {
                let ph = if idx == 0b111 {
                    Complex64::from_polar(1.0, self.angle())
                } else {
                    one
                };
                (idx, ph)
            }
            _ => unreachable!("single-qubit kinds have explicit matrices"),
        }
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.name())?;
        if !self.params.is_empty() {
            let ps: Vec<String> = self.params.iter().map(|p| format!("{p:.6}")).collect();
            write!(f, "({})", ps.join(","))?;
        }
        let qs: Vec<String> = self.targets.iter().map(|q| format!("q{q}")).collect();
        write!(f, " {}", qs.join(","))
    }
}
