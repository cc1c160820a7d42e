//! Amplitude encoding of pixel vectors and preparation of the pair states
//!
//! ```text
//! |ψ⟩ = (|0⟩|A⟩ + |1⟩|B⟩) / √2        |φ⟩ = (|A| |0⟩ − |B| |1⟩) / √Z,   Z = |A|² + |B|²
//! ```
//!
//! State preparation uses a binary rotation tree: the most significant
//! qubit is rotated first, and every lower qubit gets a uniformly
//! controlled RY conditioned on all qubits above it. Each uniformly
//! controlled rotation is expanded into alternating RY and CNOT gates
//! along a Gray-code path, so prepared circuits contain only RY and CNOT.

use crate::error::{Error, Result};
use crate::sim::{Circuit, GateOp};

/// Flattened block of non-negative pixel values and its Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockVector {
    values: Vec<u32>,
    norm: f64,
}

impl BlockVector {
    pub fn new(values: Vec<u32>) -> Self {
        let norm = values
            .iter()
            .map(|&v| f64::from(v) * f64::from(v))
            .sum::<f64>()
            .sqrt();
        Self { values, norm }
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    /// Length after zero-padding to a power of two (at least 2).
    pub fn padded_len(&self) -> usize {
        self.values.len().next_power_of_two().max(2)
    }
}

impl From<&[u32]> for BlockVector {
    fn from(values: &[u32]) -> Self {
        Self::new(values.to_vec())
    }
}

/// Zero-pad to the next power of two and scale to unit length.
pub fn normalize(values: &[u32]) -> Result<(Vec<f64>, f64)> {
    if values.is_empty() {
        return Err(Error::Encoding("cannot encode an empty vector".into()));
    }
    let block = BlockVector::new(values.to_vec());
    if block.is_zero() {
        return Err(Error::Encoding(
            "cannot encode an all-zero vector (undefined direction)".into(),
        ));
    }
    let mut amps: Vec<f64> = values.iter().map(|&v| f64::from(v) / block.norm).collect();
    amps.resize(block.padded_len(), 0.0);
    Ok((amps, block.norm))
}

/// Circuit on log₂(len) qubits taking |0…0⟩ to the given real amplitudes.
/// Amplitude `i` belongs to basis index `i` (qubit 0 least significant).
pub fn prepare_state_circuit(amplitudes: &[f64]) -> Result<Circuit> {
    let len = amplitudes.len();
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::shape(format!(
            "amplitude count {len} is not a power of two >= 2"
        )));
    }
    let norm_sqr: f64 = amplitudes.iter().map(|a| a * a).sum();
    if !norm_sqr.is_finite() || (norm_sqr.sqrt() - 1.0).abs() > 1e-6 {
        return Err(Error::argument(format!(
            "amplitudes must have unit norm, got {}",
            norm_sqr.sqrt()
        )));
    }
    let k = len.trailing_zeros() as usize;
    let mut circuit = Circuit::new(k)?;

    // Squared norms of every aligned block, per level: level_norms[t][c] is
    // the squared norm of amplitudes whose bits above t-1 equal c, i.e. the
    // block of size 2^t starting at c·2^t.
    let mut level_norms: Vec<Vec<f64>> = Vec::with_capacity(k + 1);
    level_norms.push(amplitudes.iter().map(|a| a * a).collect());
    for t in 1..=k {
        let prev = &level_norms[t - 1];
        level_norms.push(prev.chunks(2).map(|p| p[0] + p[1]).collect());
    }

    // Rotate qubit t = k-1 down to 0; qubits above t are controls.
    for t in (0..k).rev() {
        let controls = k - 1 - t;
        let angles: Vec<f64> = (0..1usize << controls)
            .map(|c| {
                if t == 0 {
                    // Leaf level keeps signs.
                    2.0 * amplitudes[2 * c + 1].atan2(amplitudes[2 * c])
                } else {
                    let lower = level_norms[t][2 * c].sqrt();
                    let upper = level_norms[t][2 * c + 1].sqrt();
                    2.0 * upper.atan2(lower)
                }
            })
            .collect();
        let control_qubits: Vec<usize> = (t + 1..k).collect();
        push_uniformly_controlled_ry(&mut circuit, &control_qubits, t, &angles)?;
    }
    Ok(circuit)
}

fn gray(i: usize) -> usize {
    i ^ (i >> 1)
}

/// Append a uniformly controlled RY: for each control value `c` (bit `j`
/// of `c` read from `controls[j]`) the target is rotated by `angles[c]`.
fn push_uniformly_controlled_ry(
    circuit: &mut Circuit,
    controls: &[usize],
    target: usize,
    angles: &[f64],
) -> Result<()> {
    const EPS: f64 = 1e-14;
    if angles.iter().all(|a| a.abs() < EPS) {
        return Ok(());
    }
    let first = angles[0];
    if angles.iter().all(|a| (a - first).abs() < EPS) {
        circuit.push(GateOp::ry(target, first))?;
        return Ok(());
    }
    let n = angles.len();
    // The RY before step i sees the target flipped by the parity of
    // (c & gray(i)), so the effective angle for c is
    //   Σ_i (−1)^{popcount(c & gray(i))} α_i = θ_c,
    // inverted with the orthogonal ±1 matrix.
    let alphas: Vec<f64> = (0..n)
        .map(|i| {
            let g = gray(i);
            angles
                .iter()
                .enumerate()
                .map(|(c, theta)| {
                    if (c & g).count_ones().is_multiple_of(2) {
                        *theta
                    } else {
                        -*theta
                    }
                })
                .sum::<f64>()
                / n as f64
        })
        .collect();
    for (i, alpha) in alphas.iter().enumerate() {
        circuit.push(GateOp::ry(target, *alpha))?;
        let flip = gray(i) ^ gray((i + 1) % n);
        let bit = flip.trailing_zeros() as usize;
        circuit.push(GateOp::cnot(controls[bit], target))?;
    }
    Ok(())
}

/// Encoded pair (A, B) with the preparation circuits for |ψ⟩ and |φ⟩.
///
/// `psi_circuit` acts on `1 + data_qubits` qubits: the data register is
/// local qubits `0..data_qubits` and the label qubit is the most
/// significant one, local qubit `data_qubits`.
#[derive(Debug, Clone)]
pub struct PairEncoding {
    pub a: BlockVector,
    pub b: BlockVector,
    pub z: f64,
    pub data_qubits: usize,
    pub psi_circuit: Circuit,
    pub phi_circuit: Circuit,
}

impl PairEncoding {
    /// Exact amplitudes |ψ⟩ should have, label qubit most significant.
    pub fn psi_amplitudes(&self) -> Result<Vec<f64>> {
        let (mut amps, _) = normalize(self.a.values())?;
        let (b_amps, _) = normalize(self.b.values())?;
        let dim = 1usize << self.data_qubits;
        amps.resize(dim, 0.0);
        amps.extend(
            b_amps
                .iter()
                .copied()
                .chain(std::iter::repeat(0.0))
                .take(dim),
        );
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Ok(amps.into_iter().map(|x| x * s).collect())
    }

    /// Exact amplitudes of |φ⟩.
    pub fn phi_amplitudes(&self) -> [f64; 2] {
        let sz = self.z.sqrt();
        [self.a.norm() / sz, -self.b.norm() / sz]
    }
}

/// Build the |ψ⟩ and |φ⟩ preparations for a pair of equal-length vectors.
pub fn build_pair_encoding(a: &[u32], b: &[u32]) -> Result<PairEncoding> {
    if a.len() != b.len() {
        return Err(Error::shape(format!(
            "vectors have different lengths ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    let block_a = BlockVector::new(a.to_vec());
    let block_b = BlockVector::new(b.to_vec());
    if block_a.is_zero() || block_b.is_zero() {
        return Err(Error::Encoding(
            "cannot encode an all-zero vector (undefined direction)".into(),
        ));
    }
    let z = block_a.norm().powi(2) + block_b.norm().powi(2);
    let data_qubits = block_a.padded_len().trailing_zeros() as usize;

    let mut enc = PairEncoding {
        a: block_a,
        b: block_b,
        z,
        data_qubits,
        psi_circuit: Circuit::new(1)?,
        phi_circuit: Circuit::new(1)?,
    };
    enc.psi_circuit = prepare_state_circuit(&enc.psi_amplitudes()?)?;
    let theta = 2.0 * (-enc.b.norm()).atan2(enc.a.norm());
    enc.phi_circuit.push(GateOp::ry(0, theta))?;
    Ok(enc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{GateKind, StateVector};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn simulate(c: &Circuit) -> Vec<f64> {
        let mut s = StateVector::new(c.num_qubits()).unwrap();
        s.run(c).unwrap();
        s.amplitudes()
            .iter()
            .map(|a| {
                assert!(a.im.abs() < 1e-12);
                a.re
            })
            .collect()
    }

    #[test]
    fn uniform_vector() {
        let (amps, norm) = normalize(&[9, 9, 9, 9]).unwrap();
        assert_eq!(norm, 18.0);
        assert!(amps.iter().all(|a| (a - 0.5).abs() < 1e-15));
    }

    #[test]
    fn nines_vector_norm() {
        let (amps, norm) = normalize(&[9, 9, 8, 9]).unwrap();
        assert!((norm - 307f64.sqrt()).abs() < 1e-12);
        assert!((norm - 17.5214).abs() < 1e-4);
        assert!((amps[2] - 8.0 / 307f64.sqrt()).abs() < 1e-15);
        let s: f64 = amps.iter().map(|a| a * a).sum();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_vector_rejected() {
        assert!(matches!(normalize(&[0, 0, 0, 0]), Err(Error::Encoding(_))));
    }

    #[test]
    fn padding_to_power_of_two() {
        let (amps, norm) = normalize(&[3, 4, 0]).unwrap();
        assert_eq!(amps.len(), 4);
        assert_eq!(norm, 5.0);
        let (amps, _) = normalize(&[7]).unwrap();
        assert_eq!(amps, vec![1.0, 0.0]);
    }

    #[test]
    fn prepare_ground_state_is_empty() {
        let c = prepare_state_circuit(&[1.0, 0.0]).unwrap();
        assert!(c.is_empty());
        assert_eq!(simulate(&c), vec![1.0, 0.0]);
    }

    #[test]
    fn prepare_plus_is_single_ry() {
        let c = prepare_state_circuit(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.ops()[0].kind(), GateKind::Ry);
        for a in simulate(&c) {
            assert!((a - FRAC_1_SQRT_2).abs() < 1e-12);
        }
    }

    #[test]
    fn prepare_uniform_two_qubits() {
        let c = prepare_state_circuit(&[0.5; 4]).unwrap();
        assert_eq!(c.num_qubits(), 2);
        for a in simulate(&c) {
            assert!((a - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn prepare_signed_amplitudes() {
        let target = [0.1, -0.3, 0.5, 0.2, -0.6, 0.0, 0.4, -0.2];
        let n: f64 = target.iter().map(|a| a * a).sum::<f64>().sqrt();
        let target: Vec<f64> = target.iter().map(|a| a / n).collect();
        let c = prepare_state_circuit(&target).unwrap();
        assert!(c
            .ops()
            .iter()
            .all(|op| matches!(op.kind(), GateKind::Ry | GateKind::Cnot)));
        for (got, want) in simulate(&c).iter().zip(&target) {
            assert!((got - want).abs() < 1e-9);
        }
    }

    #[test]
    fn prepare_rejects_bad_input() {
        assert!(prepare_state_circuit(&[1.0, 0.0, 0.0]).is_err());
        assert!(matches!(
            prepare_state_circuit(&[1.0, 1.0]),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn symmetric_pair() {
        let enc = build_pair_encoding(&[9, 9, 9, 9], &[9, 9, 9, 9]).unwrap();
        let phi = simulate(&enc.phi_circuit);
        assert!((phi[0] - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((phi[1] + FRAC_1_SQRT_2).abs() < 1e-12);
        let psi = simulate(&enc.psi_circuit);
        assert!(psi.iter().all(|a| (a - psi[0]).abs() < 1e-12));
    }

    #[test]
    fn reference_pair_z() {
        let enc = build_pair_encoding(&[9, 9, 9, 9], &[9, 9, 8, 9]).unwrap();
        assert!((enc.z - 631.0).abs() < 1e-9);
        assert_eq!(enc.data_qubits, 2);
        assert_eq!(enc.psi_circuit.num_qubits(), 3);
        for (got, want) in simulate(&enc.psi_circuit)
            .iter()
            .zip(enc.psi_amplitudes().unwrap())
        {
            assert!((got - want).abs() < 1e-9);
        }
    }

    #[test]
    fn unit_vector_pair() {
        let enc = build_pair_encoding(&[1, 0], &[0, 1]).unwrap();
        assert!((enc.z - 2.0).abs() < 1e-12);
        let phi = simulate(&enc.phi_circuit);
        assert!((phi[0] - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((phi[1] + FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn pair_errors() {
        assert!(matches!(
            build_pair_encoding(&[1, 2], &[1, 2, 3]),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            build_pair_encoding(&[0, 0], &[1, 2]),
            Err(Error::Encoding(_))
        ));
    }
}
