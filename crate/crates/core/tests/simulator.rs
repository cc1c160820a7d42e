mod common;

use common::{chi_square, chi_square_limit, random_circuit};
use proptest::prelude::*;
use qbm::sim::{
    bitstring, decompose_to_basis, gate_counts, Circuit, GateKind, GateOp, StateVector,
};
use qbm::Error;

fn run(c: &Circuit) -> StateVector {
    let mut s = StateVector::new(c.num_qubits()).unwrap();
    s.run(c).unwrap();
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_is_preserved(n in 1usize..=6, len in 0usize..40, seed in any::<u64>()) {
        let s = run(&random_circuit(n, len, seed, true));
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn decomposition_matches_up_to_phase(n in 1usize..=5, len in 1usize..25, seed in any::<u64>()) {
        let c = random_circuit(n, len, seed, true);
        let d = decompose_to_basis(&c).unwrap();
        for op in d.ops() {
            prop_assert!(op.is_single_qubit() || op.kind() == GateKind::Cnot, "{op}");
        }
        let overlap = run(&c).overlap(&run(&d)).unwrap();
        prop_assert!((overlap - 1.0).abs() < 1e-9, "overlap {overlap}");
    }

    #[test]
    fn inverse_returns_to_zero(n in 1usize..=5, len in 0usize..30, seed in any::<u64>()) {
        let c = random_circuit(n, len, seed, false);
        let mut s = run(&c);
        s.run(&c.inverse().unwrap()).unwrap();
        prop_assert!((s.amplitudes()[0].norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn marginals_are_distributions(n in 2usize..=5, seed in any::<u64>()) {
        let s = run(&random_circuit(n, 20, seed, true));
        let m = s.marginal_distribution(&[1, 0]).unwrap();
        prop_assert_eq!(m.len(), 4);
        prop_assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        let (p0, p1) = s.qubit_probabilities(0).unwrap();
        // qubit 1 is the low bit of the marginal index, qubit 0 the high bit
        prop_assert!((p0 - (m[0] + m[1])).abs() < 1e-10);
        prop_assert!((p1 - (m[2] + m[3])).abs() < 1e-10);
    }
}

#[test]
fn sampling_agrees_with_exact_distribution() {
    for seed in 0..8u64 {
        let s = run(&random_circuit(4, 30, seed, true));
        let qubits = [0, 2, 3];
        let probs = s.marginal_distribution(&qubits).unwrap();
        let shots = 20_000;
        let hist = s.sample_counts(&qubits, shots, seed).unwrap();
        assert_eq!(hist.values().sum::<u64>(), shots);
        let counts: Vec<u64> = (0..8)
            .map(|v| hist.get(&bitstring(v, 3)).copied().unwrap_or(0))
            .collect();
        let (stat, dof) = chi_square(&counts, &probs, shots);
        assert!(
            stat < chi_square_limit(dof),
            "seed {seed}: χ² {stat} on {dof} dof"
        );
    }
}

#[test]
fn sampling_is_seeded() {
    let s = run(&random_circuit(3, 12, 9, false));
    let a = s.sample_counts(&[0, 1, 2], 500, 77).unwrap();
    assert_eq!(a, s.sample_counts(&[0, 1, 2], 500, 77).unwrap());
    assert_ne!(a, s.sample_counts(&[0, 1, 2], 500, 78).unwrap());
}

#[test]
fn bitstring_order_is_most_significant_first() {
    let mut s = StateVector::new(3).unwrap();
    s.apply(&GateOp::x(0)).unwrap();
    let hist = s.sample_counts(&[0, 1], 10, 0).unwrap();
    assert_eq!(hist.get("01"), Some(&10));
}

#[test]
fn gate_cost_table() {
    let cases = [
        (GateOp::cnot(0, 1), 1),
        (GateOp::cphase(0, 1, 0.3), 2),
        (GateOp::cswap(0, 1, 2), 8),
        (GateOp::ccphase(0, 1, 2, 0.3), 8),
        (GateOp::h(2), 0),
    ];
    for (op, cnots) in cases {
        let c = Circuit::from_ops(3, [op.clone()]).unwrap();
        assert_eq!(gate_counts(&c).unwrap().cnot_count, cnots, "{op}");
    }
}

#[test]
fn capacity_and_index_errors() {
    assert!(matches!(StateVector::new(25), Err(Error::Capacity(_))));
    assert!(matches!(Circuit::new(25), Err(Error::Capacity(_))));
    let mut s = StateVector::new(2).unwrap();
    assert!(matches!(s.apply(&GateOp::h(2)), Err(Error::Index { .. })));
    assert!(GateOp::new(GateKind::Cnot, vec![1, 1], vec![]).is_err());
}
