//! Swap-test estimate of the Euclidean distance between two pixel vectors.
//!
//! The ancilla reads 0 with probability `½ + ½·|⟨φ|ψ⟩|²`, where the overlap
//! is taken over the label qubit of |ψ⟩, and `D² = 2Z·|⟨φ|ψ⟩|²`.

use crate::encoding::{build_pair_encoding, PairEncoding};
use crate::error::{Error, Result};
use crate::noise::{NoiseModel, TrajectorySimulator};
use crate::rng::derive_seed;
use crate::sim::{Circuit, GateOp, StateVector};

/// Qubit measured at the end of the swap test.
pub const ANCILLA: usize = 0;
/// Qubit holding |φ⟩.
pub const PHI_QUBIT: usize = 1;
/// First qubit of the |ψ⟩ register (data register, then label on top).
pub const PSI_OFFSET: usize = 2;

/// Label qubit of |ψ⟩ in a swap-test circuit built for `enc`.
pub fn psi_label_qubit(enc: &PairEncoding) -> usize {
    PSI_OFFSET + enc.data_qubits
}

/// Ancilla H, |φ⟩ and |ψ⟩ preparation, CSWAP(ancilla; φ, ψ-label), ancilla H.
pub fn build_swap_test_circuit(enc: &PairEncoding) -> Result<Circuit> {
    let total = enc.data_qubits + 3;
    let mut c = Circuit::new(total)?;
    c.push(GateOp::h(ANCILLA))?;
    c.append_mapped(&enc.phi_circuit, &[PHI_QUBIT])?;
    let psi_map: Vec<usize> = (PSI_OFFSET..total).collect();
    c.append_mapped(&enc.psi_circuit, &psi_map)?;
    c.push(GateOp::cswap(ANCILLA, PHI_QUBIT, psi_label_qubit(enc)))?;
    c.push(GateOp::h(ANCILLA))?;
    Ok(c)
}

/// `clamp(2·p0 − 1, 0, 1)`.
pub fn overlap_from_p0(p0: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::argument(format!("p0 must lie in [0, 1], got {p0}")));
    }
    Ok((2.0 * p0 - 1.0).clamp(0.0, 1.0))
}

/// `√(2·Z·overlap)`.
pub fn distance_from_overlap(overlap: f64, z: f64) -> Result<f64> {
    if z.is_nan() || z <= 0.0 {
        return Err(Error::argument(format!("Z must be positive, got {z}")));
    }
    if !(0.0..=1.0).contains(&overlap) {
        return Err(Error::argument(format!(
            "overlap must lie in [0, 1], got {overlap}"
        )));
    }
    Ok((2.0 * z * overlap).sqrt())
}

/// Exact noiseless ancilla P(0) for the pair.
pub fn exact_p0(a: &[u32], b: &[u32]) -> Result<f64> {
    let enc = build_pair_encoding(a, b)?;
    let circuit = build_swap_test_circuit(&enc)?;
    let mut s = StateVector::new(circuit.num_qubits())?;
    s.run(&circuit)?;
    Ok(s.qubit_probabilities(ANCILLA)?.0)
}

/// Distance estimate averaged over independent runs.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceEstimate {
    pub mean_distance: f64,
    /// Sample standard deviation of the per-run distances (0 for one run).
    pub std_distance: f64,
    pub runs: u64,
    pub shots_per_run: u64,
    pub p0_mean: f64,
    pub z: f64,
    pub seed: u64,
}

/// Sample mean and (n−1) standard deviation.
pub(crate) fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

enum Backend {
    Exact(StateVector),
    Noisy(TrajectorySimulator),
}

/// Swap-test circuit of one pair, prepared for repeated estimation.
pub struct SwapEstimator {
    enc: PairEncoding,
    circuit: Circuit,
    backend: Backend,
}

impl SwapEstimator {
    pub fn new(a: &[u32], b: &[u32], noise: Option<&NoiseModel>) -> Result<Self> {
        let enc = build_pair_encoding(a, b)?;
        let circuit = build_swap_test_circuit(&enc)?;
        let backend = match noise {
            Some(model) => Backend::Noisy(TrajectorySimulator::new(&circuit, *model, &[ANCILLA])?),
            None => {
                let mut s = StateVector::new(circuit.num_qubits())?;
                s.run(&circuit)?;
                Backend::Exact(s)
            }
        };
        Ok(Self {
            enc,
            circuit,
            backend,
        })
    }

    pub fn encoding(&self) -> &PairEncoding {
        &self.enc
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    /// Estimated ancilla P(0) from one batch of shots.
    pub fn sample_p0(&self, shots: u64, seed: u64) -> Result<f64> {
        let hist = match &self.backend {
            Backend::Exact(state) => state.sample_counts(&[ANCILLA], shots, seed)?,
            Backend::Noisy(sim) => sim.run(shots, seed)?.histogram,
        };
        Ok(hist.get("0").copied().unwrap_or(0) as f64 / shots as f64)
    }

    pub fn estimate(&self, shots: u64, runs: u64, seed: u64) -> Result<DistanceEstimate> {
        if shots == 0 || runs == 0 {
            return Err(Error::argument("shots and runs must be at least 1"));
        }
        let mut distances = Vec::with_capacity(runs as usize);
        let mut p0s = Vec::with_capacity(runs as usize);
        for run in 0..runs {
            let p0 = self.sample_p0(shots, derive_seed(seed, run))?;
            let overlap = overlap_from_p0(p0)?;
            distances.push(distance_from_overlap(overlap, self.enc.z)?);
            p0s.push(p0);
        }
        let (mean_distance, std_distance) = mean_std(&distances);
        Ok(DistanceEstimate {
            mean_distance,
            std_distance,
            runs,
            shots_per_run: shots,
            p0_mean: mean_std(&p0s).0,
            z: self.enc.z,
            seed,
        })
    }
}

/// Estimate the Euclidean distance between `a` and `b` with `runs`
/// independent batches of `shots` swap tests each.
pub fn estimate_distance(
    a: &[u32],
    b: &[u32],
    shots: u64,
    runs: u64,
    noise: Option<&NoiseModel>,
    seed: u64,
) -> Result<DistanceEstimate> {
    SwapEstimator::new(a, b, noise)?.estimate(shots, runs, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_dim_pair_uses_five_qubits() {
        let enc = build_pair_encoding(&[9, 9, 9, 9], &[9, 9, 8, 9]).unwrap();
        assert_eq!(build_swap_test_circuit(&enc).unwrap().num_qubits(), 5);
    }

    #[test]
    fn identical_pair_is_half() {
        let p0 = exact_p0(&[9, 9, 9, 9], &[9, 9, 9, 9]).unwrap();
        assert!((p0 - 0.5).abs() < 1e-10);
    }

    #[test]
    fn reference_pair_closed_form() {
        let p0 = exact_p0(&[9, 9, 9, 9], &[9, 9, 8, 9]).unwrap();
        let expect = 0.5 + 1.0 / (4.0 * 631.0);
        assert!((p0 - expect).abs() < 1e-10);
        assert!((p0 - 0.500396).abs() < 1e-6);
    }

    #[test]
    fn overlap_clamping() {
        assert_eq!(overlap_from_p0(0.5).unwrap(), 0.0);
        assert_eq!(overlap_from_p0(1.0).unwrap(), 1.0);
        assert_eq!(overlap_from_p0(0.47).unwrap(), 0.0);
        assert!(overlap_from_p0(1.2).is_err());
        assert!(overlap_from_p0(-0.01).is_err());
    }

    #[test]
    fn distance_conversion() {
        assert_eq!(distance_from_overlap(0.0, 17.0).unwrap(), 0.0);
        let d = distance_from_overlap(1.0 / (2.0 * 631.0), 631.0).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
        // A=[1,0], B=[0,1]: D² = 2, Z = 2 → overlap ½
        let d = distance_from_overlap(0.5, 2.0).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-12);
        assert!(distance_from_overlap(0.5, 0.0).is_err());
        assert!(distance_from_overlap(0.5, -1.0).is_err());
    }

    #[test]
    fn unit_pair_overlap_by_inner_products() {
        // Brute force: ⟨φ|ψ⟩ over the label qubit is (|A|·|A⟩ − |B|·|B⟩)/√(2Z)
        // = (A − B)/√(2Z), so |⟨φ|ψ⟩|² = |A−B|²/(2Z).
        let (a, b) = ([1.0f64, 0.0], [0.0f64, 1.0]);
        let z = 2.0f64;
        let v: Vec<f64> = a
            .iter()
            .zip(&b)
            .map(|(x, y)| (x - y) / (2.0 * z).sqrt())
            .collect();
        let overlap: f64 = v.iter().map(|x| x * x).sum();
        assert!((overlap - 0.5).abs() < 1e-15);
        let p0 = exact_p0(&[1, 0], &[0, 1]).unwrap();
        assert!((overlap_from_p0(p0).unwrap() - overlap).abs() < 1e-10);
    }

    #[test]
    fn estimate_is_deterministic() {
        let a = estimate_distance(&[1, 5, 9, 2], &[7, 3, 0, 4], 500, 4, None, 99).unwrap();
        let b = estimate_distance(&[1, 5, 9, 2], &[7, 3, 0, 4], 500, 4, None, 99).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.runs, 4);
        assert!(a.mean_distance >= 0.0);
        assert!((0.0..=1.0).contains(&a.p0_mean));
    }

    #[test]
    fn estimate_rejects_zero_runs() {
        assert!(estimate_distance(&[1, 2], &[2, 1], 10, 0, None, 1).is_err());
        assert!(estimate_distance(&[1, 2], &[2, 1], 0, 1, None, 1).is_err());
    }

    #[test]
    fn mean_std_conventions() {
        assert_eq!(mean_std(&[3.0]), (3.0, 0.0));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0]);
        assert!((m - 2.0).abs() < 1e-15 && (s - 1.0).abs() < 1e-15);
    }
}
