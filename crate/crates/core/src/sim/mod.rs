//! Dense state-vector simulation of small circuits.

mod circuit;
mod gate;
mod state;

pub use circuit::{decompose_to_basis, gate_counts, Circuit, GateReport};
pub use gate::{GateKind, GateOp};
pub use state::{
    bitstring, parse_bitstring, sample_distribution, Histogram, StateVector, MAX_QUBITS,
};
