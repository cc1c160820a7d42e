//! Gate-attached depolarizing noise: Monte Carlo trajectories for
//! production runs and an exact density-matrix oracle for small circuits.

mod density;
mod model;
mod trajectory;

pub use density::{evolve_density, exact_density_probabilities, DensityMatrix, MAX_DENSITY_QUBITS};
pub use model::{
    apply_depolarizing, fidelity_to_depolarizing, sample_depolarizing_error, NoiseModel, Pauli,
    PauliString,
};
pub use trajectory::{
    run_naive_trajectory, run_noisy_trajectories, TrajectoryResult, TrajectorySimulator,
};
