#![allow(dead_code)]

use qbm::rng::rng_from_seed;
use qbm::sim::{Circuit, GateOp};
use rand::seq::SliceRandom;
use rand::Rng;

/// Random circuit over the full gate set, `len` gates on `n` qubits.
pub fn random_circuit(n: usize, len: usize, seed: u64, with_sx: bool) -> Circuit {
    let mut rng = rng_from_seed(seed);
    let mut c = Circuit::new(n).unwrap();
    let max_kind = if with_sx { 10 } else { 9 };
    for _ in 0..len {
        let mut qs: Vec<usize> = (0..n).collect();
        qs.shuffle(&mut rng);
        let theta = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let kind = rng.random_range(0..max_kind);
        let op = match (kind, n) {
            (0, _) => GateOp::h(qs[0]),
            (1, _) => GateOp::x(qs[0]),
            (2, _) => GateOp::ry(qs[0], theta),
            (3, _) => GateOp::rz(qs[0], theta),
            (4, _) => GateOp::phase(qs[0], theta),
            (5, 2..) => GateOp::cnot(qs[0], qs[1]),
            (6, 2..) => GateOp::cphase(qs[0], qs[1], theta),
            (7, 3..) => GateOp::cswap(qs[0], qs[1], qs[2]),
            (8, 3..) => GateOp::ccphase(qs[0], qs[1], qs[2], theta),
            (9, _) => GateOp::sx(qs[0]),
            _ => GateOp::ry(qs[0], theta),
        };
        c.push(op).unwrap();
    }
    c
}

/// Pearson χ² of observed counts against expected probabilities; bins with
/// zero probability must stay empty.
pub fn chi_square(counts: &[u64], probs: &[f64], shots: u64) -> (f64, usize) {
    let mut stat = 0.0;
    let mut dof = 0usize;
    for (&o, &p) in counts.iter().zip(probs) {
        let e = p * shots as f64;
        if e < 1e-9 {
            assert_eq!(o, 0, "outcome with zero probability observed");
            continue;
        }
        stat += (o as f64 - e).powi(2) / e;
        dof += 1;
    }
    (stat, dof.saturating_sub(1))
}

/// Generous χ² bound, roughly the 1e-6 upper tail.
pub fn chi_square_limit(dof: usize) -> f64 {
    let k = dof.max(1) as f64;
    k + 10.0 * (2.0 * k).sqrt() + 25.0
}
