//! Exact density-matrix evolution under the same noise model as the
//! trajectory engine. Used as a test oracle on small registers.
//!
//! Gates act through their dense local matrices, not the state-vector
//! kernels, so the two engines share only the gate definitions.

use num_complex::Complex64;

use super::model::{NoiseModel, PauliString};
use crate::error::{Error, Result};
use crate::sim::{decompose_to_basis, Circuit};

/// Largest register the oracle accepts.
pub const MAX_DENSITY_QUBITS: usize = 6;

type Matrix = Vec<Vec<Complex64>>;

#[derive(Debug, Clone)]
pub struct DensityMatrix {
    num_qubits: usize,
    dim: usize,
    // row-major dim × dim
    data: Vec<Complex64>,
}

impl DensityMatrix {
    /// `|0…0⟩⟨0…0|`.
    pub fn new(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_DENSITY_QUBITS {
            return Err(Error::Capacity(format!(
                "density-matrix oracle supports 1..={MAX_DENSITY_QUBITS} qubits, got {num_qubits}"
            )));
        }
        let dim = 1 << num_qubits;
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        data[0] = Complex64::new(1.0, 0.0);
        Ok(Self {
            num_qubits,
            dim,
            data,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    /// ρ → U ρ U† for a local matrix on `targets`.
    pub fn conjugate(&mut self, local: &Matrix, targets: &[usize]) {
        let dim = self.dim;
        // left multiply: columns are independent vectors
        let mut column = vec![Complex64::new(0.0, 0.0); dim];
        for col in 0..dim {
            for (row, v) in column.iter_mut().enumerate() {
                *v = self.data[row * dim + col];
            }
            apply_local(local, targets, &mut column, false);
            for (row, v) in column.iter().enumerate() {
                self.data[row * dim + col] = *v;
            }
        }
        // right multiply by U†: each row r becomes r·U† = (conj(U)·rᵀ)ᵀ
        for row in 0..dim {
            let slice = &mut self.data[row * dim..(row + 1) * dim];
            apply_local(local, targets, slice, true);
        }
    }

    /// Exact depolarizing channel on `qubits` with error probability `p`.
    pub fn depolarize(&mut self, qubits: &[usize], p: f64) {
        if p == 0.0 {
            return;
        }
        let strings = 1usize << (2 * qubits.len());
        let weight = p / (strings - 1) as f64;
        let mut acc: Vec<Complex64> = self.data.iter().map(|z| z * (1.0 - p)).collect();
        for index in 1..strings {
            let ps = PauliString::from_index(index, qubits.len());
            let mut term = self.clone();
            for (&pauli, &q) in ps.0.iter().zip(qubits) {
                term.conjugate(&pauli_matrix(pauli), &[q]);
            }
            for (a, t) in acc.iter_mut().zip(&term.data) {
                *a += t * weight;
            }
        }
        self.data = acc;
    }

    /// `(p0, p1)` of measuring `qubit`.
    pub fn qubit_probabilities(&self, qubit: usize) -> Result<(f64, f64)> {
        if qubit >= self.num_qubits {
            return Err(Error::Index {
                index: qubit,
                num_qubits: self.num_qubits,
            });
        }
        let mut p1 = 0.0;
        let mut tr = 0.0;
        for i in 0..self.dim {
            let d = self.data[i * self.dim + i].re;
            tr += d;
            if (i >> qubit) & 1 == 1 {
                p1 += d;
            }
        }
        let p1 = (p1 / tr).clamp(0.0, 1.0);
        Ok((1.0 - p1, p1))
    }
}

fn pauli_matrix(p: super::model::Pauli) -> Matrix {
    use super::model::Pauli;
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match p {
        Pauli::I => vec![vec![o, z], vec![z, o]],
        Pauli::X => vec![vec![z, o], vec![o, z]],
        Pauli::Y => vec![vec![z, -i], vec![i, z]],
        Pauli::Z => vec![vec![o, z], vec![z, -o]],
    }
}

/// Multiply `vec` by the embedding of `local` (optionally conjugated).
/// `targets[j]` carries bit `j` of the local index.
fn apply_local(local: &Matrix, targets: &[usize], vec: &mut [Complex64], conj: bool) {
    let k = targets.len();
    let ldim = 1usize << k;
    let mask: usize = targets.iter().map(|&q| 1usize << q).sum();
    let offsets: Vec<usize> = (0..ldim)
        .map(|l| {
            targets
                .iter()
                .enumerate()
                .fold(0, |acc, (j, &q)| acc | (((l >> j) & 1) << q))
        })
        .collect();
    let mut gathered = vec![Complex64::new(0.0, 0.0); ldim];
    for base in 0..vec.len() {
        if base & mask != 0 {
            continue;
        }
        for (g, &off) in gathered.iter_mut().zip(&offsets) {
            *g = vec[base | off];
        }
        for (r, &off) in offsets.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, g) in gathered.iter().enumerate() {
                let m = if conj {
                    local[r][c].conj()
                } else {
                    local[r][c]
                };
                acc += m * g;
            }
            vec[base | off] = acc;
        }
    }
}

/// Evolve `|0…0⟩⟨0…0|` through the decomposed `circuit`, applying the
/// exact depolarizing channel after every gate. Returns the final matrix.
pub fn evolve_density(circuit: &Circuit, noise: &NoiseModel) -> Result<DensityMatrix> {
    if circuit.num_qubits() > MAX_DENSITY_QUBITS {
        return Err(Error::Capacity(format!(
            "density-matrix oracle supports at most {MAX_DENSITY_QUBITS} qubits, circuit has {}",
            circuit.num_qubits()
        )));
    }
    let basis = decompose_to_basis(circuit)?;
    let mut rho = DensityMatrix::new(basis.num_qubits())?;
    for op in basis.ops() {
        rho.conjugate(&op.local_matrix(), op.targets());
        rho.depolarize(
            op.targets(),
            noise.probability_for_arity(op.targets().len()),
        );
    }
    Ok(rho)
}

/// Exact measurement marginal of `qubit` under the noise model.
pub fn exact_density_probabilities(
    circuit: &Circuit,
    noise: &NoiseModel,
    qubit: usize,
) -> Result<(f64, f64)> {
    evolve_density(circuit, noise)?.qubit_probabilities(qubit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{GateOp, StateVector};

    fn sample_circuit() -> Circuit {
        Circuit::from_ops(
            3,
            [
                GateOp::h(0),
                GateOp::ry(1, 0.9),
                GateOp::cnot(0, 2),
                GateOp::cphase(1, 2, 0.6),
                GateOp::cswap(0, 1, 2),
                GateOp::sx(1),
                GateOp::h(0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn zero_noise_matches_state_vector() {
        let c = sample_circuit();
        let mut s = StateVector::new(3).unwrap();
        s.run(&c).unwrap();
        for q in 0..3 {
            let (e0, e1) = s.qubit_probabilities(q).unwrap();
            let (d0, d1) = exact_density_probabilities(&c, &NoiseModel::ideal(), q).unwrap();
            assert!((e0 - d0).abs() < 1e-10 && (e1 - d1).abs() < 1e-10);
        }
    }

    #[test]
    fn trace_is_preserved_at_every_step() {
        let noise = NoiseModel::new(0.97, 0.9).unwrap();
        let basis = decompose_to_basis(&sample_circuit()).unwrap();
        let mut rho = DensityMatrix::new(3).unwrap();
        for op in basis.ops() {
            rho.conjugate(&op.local_matrix(), op.targets());
            rho.depolarize(
                op.targets(),
                noise.probability_for_arity(op.targets().len()),
            );
            assert!((rho.trace() - 1.0).norm() < 1e-10);
        }
    }

    #[test]
    fn full_depolarization_gives_maximally_mixed_marginal() {
        // p = 3/4 on one qubit is the completely depolarizing channel;
        // fidelity 0.25 maps to exactly that.
        let noise = NoiseModel::new(0.25, 1.0).unwrap();
        let c = Circuit::from_ops(1, [GateOp::ry(0, 0.3), GateOp::h(0), GateOp::x(0)]).unwrap();
        let (p0, p1) = exact_density_probabilities(&c, &noise, 0).unwrap();
        assert!((p0 - 0.5).abs() < 1e-10 && (p1 - 0.5).abs() < 1e-10);
    }

    #[test]
    fn too_many_qubits() {
        let c = Circuit::new(7).unwrap();
        assert!(matches!(
            exact_density_probabilities(&c, &NoiseModel::ideal(), 0),
            Err(Error::Capacity(_))
        ));
    }
}
