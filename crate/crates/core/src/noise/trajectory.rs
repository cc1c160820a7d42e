//! Monte Carlo Pauli-trajectory execution of noisy circuits.
//!
//! The circuit is decomposed to CNOT + single-qubit gates and a
//! depolarizing channel follows every gate. Each trajectory samples its
//! error locations up front from its own seeded stream. Trajectories with
//! no error sample straight from the cached noiseless output; the others
//! resume from the cached noiseless state just before their first error,
//! so only the tail of the circuit is re-simulated.

use rand::Rng;

use super::model::{sample_depolarizing_error, NoiseModel, PauliString};
use crate::error::{Error, Result};
use crate::rng::child_rng;
use crate::sim::{bitstring, decompose_to_basis, Circuit, Histogram, StateVector};

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryResult {
    pub histogram: Histogram,
    pub trajectories: u64,
    pub seed: u64,
}

impl TrajectoryResult {
    /// Empirical probability that the measured register reads `bits`.
    pub fn frequency(&self, bits: &str) -> f64 {
        self.histogram.get(bits).copied().unwrap_or(0) as f64 / self.trajectories as f64
    }
}

/// Checkpoints keep every noiseless prefix state; cap their memory.
const CHECKPOINT_BUDGET_BYTES: usize = 256 << 20;

/// A decomposed circuit prepared for repeated noisy execution.
#[derive(Debug, Clone)]
pub struct TrajectorySimulator {
    basis: Circuit,
    noise: NoiseModel,
    measured: Vec<usize>,
    // checkpoints[i] is the noiseless state after the first i gates.
    checkpoints: Vec<StateVector>,
    final_cdf: Vec<f64>,
}

impl TrajectorySimulator {
    pub fn new(circuit: &Circuit, noise: NoiseModel, measured: &[usize]) -> Result<Self> {
        let basis = decompose_to_basis(circuit)?;
        let mut state = StateVector::new(basis.num_qubits())?;
        // validates the measured list
        state.marginal_distribution(measured)?;

        let bytes_per_state = 16usize << basis.num_qubits();
        let keep_all = bytes_per_state.saturating_mul(basis.len() + 1) <= CHECKPOINT_BUDGET_BYTES;
        let mut checkpoints = Vec::with_capacity(if keep_all { basis.len() + 1 } else { 1 });
        checkpoints.push(state.clone());
        for op in basis.ops() {
            state.apply_unchecked(op);
            if keep_all {
                checkpoints.push(state.clone());
            }
        }
        let dist = state.marginal_distribution(measured)?;
        Ok(Self {
            basis,
            noise,
            measured: measured.to_vec(),
            checkpoints,
            final_cdf: cumulative(&dist),
        })
    }

    pub fn basis_circuit(&self) -> &Circuit {
        &self.basis
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    /// Execute `shots` independent trajectories, one measurement each.
    pub fn run(&self, shots: u64, seed: u64) -> Result<TrajectoryResult> {
        if shots == 0 {
            return Err(Error::argument("shots must be at least 1"));
        }
        let width = self.measured.len();
        let mut tally = vec![0u64; 1 << width];
        for t in 0..shots {
            let mut rng = child_rng(seed, t);
            tally[self.one_trajectory(&mut rng)] += 1;
        }
        let histogram = tally
            .into_iter()
            .enumerate()
            .filter(|&(_, c)| c > 0)
            .map(|(v, c)| (bitstring(v, width), c))
            .collect();
        Ok(TrajectoryResult {
            histogram,
            trajectories: shots,
            seed,
        })
    }

    fn one_trajectory<R: Rng>(&self, rng: &mut R) -> usize {
        let ops = self.basis.ops();
        let errors: Vec<(usize, PauliString)> = if self.noise.is_ideal() {
            Vec::new()
        } else {
            ops.iter()
                .enumerate()
                .filter_map(|(i, op)| {
                    let p = self.noise.probability_for_arity(op.targets().len());
                    sample_depolarizing_error(op.targets().len(), p, rng).map(|e| (i, e))
                })
                .collect()
        };
        let Some(&(first, _)) = errors.first() else {
            return sample_cdf(&self.final_cdf, rng.random::<f64>());
        };

        let mut state = if self.checkpoints.len() == ops.len() + 1 {
            self.checkpoints[first + 1].clone()
        } else {
            let mut s = self.checkpoints[0].clone();
            for op in &ops[..=first] {
                s.apply_unchecked(op);
            }
            s
        };
        let mut pending = errors.iter().peekable();
        for (i, op) in ops.iter().enumerate().skip(first) {
            if i > first {
                state.apply_unchecked(op);
            }
            if let Some((_, pauli)) = pending.next_if(|(at, _)| *at == i) {
                pauli.apply(&mut state, op.targets());
            }
        }
        measure_once(&state, &self.measured, rng.random::<f64>())
    }
}

fn cumulative(dist: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    dist.iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect()
}

fn sample_cdf(cdf: &[f64], u: f64) -> usize {
    let total = *cdf.last().expect("non-empty distribution");
    let target = u * total;
    cdf.partition_point(|&c| c <= target).min(cdf.len() - 1)
}

fn measure_once(state: &StateVector, qubits: &[usize], u: f64) -> usize {
    let amps = state.amplitudes();
    let total: f64 = state.norm_sqr();
    let target = u * total;
    let mut acc = 0.0;
    let mut hit = amps.len() - 1;
    for (i, a) in amps.iter().enumerate() {
        acc += a.norm_sqr();
        if acc > target {
            hit = i;
            break;
        }
    }
    qubits
        .iter()
        .enumerate()
        .fold(0usize, |v, (j, &q)| v | (((hit >> q) & 1) << j))
}

/// Decompose `circuit`, then run `shots` noisy trajectories measuring
/// `measured_qubits` once per trajectory.
pub fn run_noisy_trajectories(
    circuit: &Circuit,
    noise: &NoiseModel,
    measured_qubits: &[usize],
    shots: u64,
    seed: u64,
) -> Result<TrajectoryResult> {
    TrajectorySimulator::new(circuit, *noise, measured_qubits)?.run(shots, seed)
}

/// Step-by-step reference implementation: replay every gate and draw a
/// channel realization after each one. Slow; used to cross-check the
/// checkpointed engine.
pub fn run_naive_trajectory<R: Rng>(
    circuit: &Circuit,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<StateVector> {
    let basis = decompose_to_basis(circuit)?;
    let mut state = StateVector::new(basis.num_qubits())?;
    for op in basis.ops() {
        state.apply(op)?;
        let p = noise.probability_for_arity(op.targets().len());
        super::model::apply_depolarizing(&mut state, op.targets(), p, rng)?;
    }
    Ok(state)
}
