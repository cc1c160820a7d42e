use rand::Rng;

use crate::error::{Error, Result};
use crate::sim::StateVector;

/// Map a gate fidelity to a depolarizing probability, `p = 1 − fidelity`.
pub fn fidelity_to_depolarizing(fidelity: f64) -> Result<f64> {
    if !(fidelity > 0.0 && fidelity <= 1.0) {
        return Err(Error::argument(format!(
            "gate fidelity must lie in (0, 1], got {fidelity}"
        )));
    }
    Ok(1.0 - fidelity)
}

/// Depolarizing noise attached to gates by arity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    fidelity_1q: f64,
    fidelity_2q: f64,
    p_1q: f64,
    p_2q: f64,
}

impl NoiseModel {
    pub fn new(fidelity_1q: f64, fidelity_2q: f64) -> Result<Self> {
        Ok(Self {
            fidelity_1q,
            fidelity_2q,
            p_1q: fidelity_to_depolarizing(fidelity_1q)?,
            p_2q: fidelity_to_depolarizing(fidelity_2q)?,
        })
    }

    /// Perfect gates.
    pub fn ideal() -> Self {
        Self {
            fidelity_1q: 1.0,
            fidelity_2q: 1.0,
            p_1q: 0.0,
            p_2q: 0.0,
        }
    }

    pub fn fidelity_1q(&self) -> f64 {
        self.fidelity_1q
    }

    pub fn fidelity_2q(&self) -> f64 {
        self.fidelity_2q
    }

    pub fn p_1q(&self) -> f64 {
        self.p_1q
    }

    pub fn p_2q(&self) -> f64 {
        self.p_2q
    }

    pub fn is_ideal(&self) -> bool {
        self.p_1q == 0.0 && self.p_2q == 0.0
    }

    /// Error probability after a gate acting on `arity` qubits of the
    /// decomposed basis.
    pub fn probability_for_arity(&self, arity: usize) -> f64 {
        if arity >= 2 {
            self.p_2q
        } else {
            self.p_1q
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_index(i: usize) -> Self {
        match i & 3 {
            0 => Pauli::I,
            1 => Pauli::X,
            2 => Pauli::Y,
            _ => Pauli::Z,
        }
    }
}

/// Pauli string over a list of qubits, `paulis[j]` acting on `qubits[j]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString(pub Vec<Pauli>);

impl PauliString {
    /// Decode the `index`-th of the 4^k strings over k qubits; two bits per qubit.
    pub fn from_index(index: usize, num_qubits: usize) -> Self {
        Self(
            (0..num_qubits)
                .map(|j| Pauli::from_index(index >> (2 * j)))
                .collect(),
        )
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&p| p == Pauli::I)
    }

    pub fn apply(&self, state: &mut StateVector, qubits: &[usize]) {
        for (&p, &q) in self.0.iter().zip(qubits) {
            match p {
                Pauli::I => {}
                Pauli::X => state.pauli_x(q),
                Pauli::Y => state.pauli_y(q),
                Pauli::Z => state.pauli_z(q),
            }
        }
    }
}

/// Draw the error of one depolarizing channel on `num_qubits` qubits:
/// `None` with probability `1 − p`, otherwise a uniformly chosen
/// non-identity Pauli string.
pub fn sample_depolarizing_error<R: Rng>(
    num_qubits: usize,
    p: f64,
    rng: &mut R,
) -> Option<PauliString> {
    if p > 0.0 && rng.random::<f64>() < p {
        let choices = (1usize << (2 * num_qubits)) - 1;
        Some(PauliString::from_index(
            1 + rng.random_range(0..choices),
            num_qubits,
        ))
    } else {
        None
    }
}

/// Apply one depolarizing channel realization to `qubits` of `state`.
/// Returns the Pauli string that was applied, if any.
pub fn apply_depolarizing<R: Rng>(
    state: &mut StateVector,
    qubits: &[usize],
    p: f64,
    rng: &mut R,
) -> Result<Option<PauliString>> {
    if qubits.is_empty() || qubits.len() > 2 {
        return Err(Error::argument(format!(
            "depolarizing channel acts on 1 or 2 qubits, got {}",
            qubits.len()
        )));
    }
    if !(0.0..1.0).contains(&p) {
        return Err(Error::argument(format!(
            "depolarizing probability must lie in [0, 1), got {p}"
        )));
    }
    for (i, &q) in qubits.iter().enumerate() {
        if q >= state.num_qubits() {
            return Err(Error::Index {
                index: q,
                num_qubits: state.num_qubits(),
            });
        }
        if qubits[..i].contains(&q) {
            return Err(Error::argument(format!("qubit {q} listed twice")));
        }
    }
    let err = sample_depolarizing_error(qubits.len(), p, rng);
    if let Some(ps) = &err {
        ps.apply(state, qubits);
    }
    Ok(err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use crate::sim::GateOp;
    use std::collections::{BTreeMap, BTreeSet};

    #[test]
    fn fidelity_mapping() {
        assert_eq!(fidelity_to_depolarizing(1.0).unwrap(), 0.0);
        assert!((fidelity_to_depolarizing(0.99).unwrap() - 0.01).abs() < 1e-15);
        assert!((fidelity_to_depolarizing(0.9999).unwrap() - 0.0001).abs() < 1e-15);
        for bad in [0.0, -0.1, 1.0001, f64::NAN] {
            assert!(fidelity_to_depolarizing(bad).is_err());
        }
    }

    #[test]
    fn model_derives_probabilities() {
        let m = NoiseModel::new(0.9999, 0.99).unwrap();
        assert!((m.p_1q() - 1e-4).abs() < 1e-15);
        assert!((m.p_2q() - 1e-2).abs() < 1e-15);
        assert!(NoiseModel::new(1.0, 1.0).unwrap().is_ideal());
        assert_eq!(m.probability_for_arity(2), m.p_2q());
        assert_eq!(m.probability_for_arity(1), m.p_1q());
    }

    #[test]
    fn zero_probability_leaves_state() {
        let mut s = StateVector::new(2)
            .unwrap()
            .apply_gate(&GateOp::h(0))
            .unwrap();
        let before = s.clone();
        let mut rng = rng_from_seed(1);
        for _ in 0..200 {
            assert!(apply_depolarizing(&mut s, &[0, 1], 0.0, &mut rng)
                .unwrap()
                .is_none());
        }
        assert_eq!(s, before);
    }

    #[test]
    fn probability_range_checked() {
        let mut s = StateVector::new(1).unwrap();
        let mut rng = rng_from_seed(1);
        assert!(apply_depolarizing(&mut s, &[0], 1.0, &mut rng).is_err());
        assert!(apply_depolarizing(&mut s, &[0], -0.1, &mut rng).is_err());
        assert!(apply_depolarizing(&mut s, &[], 0.1, &mut rng).is_err());
    }

    #[test]
    fn single_qubit_paulis_uniform() {
        let n = 30_000u64;
        let mut s = StateVector::new(1).unwrap();
        let mut rng = rng_from_seed(5);
        let mut tally: BTreeMap<Pauli, u64> = BTreeMap::new();
        for _ in 0..n {
            let ps = apply_depolarizing(&mut s, &[0], 1.0 - 1e-12, &mut rng)
                .unwrap()
                .expect("error fires");
            *tally.entry(ps.0[0]).or_default() += 1;
        }
        assert_eq!(tally.len(), 3);
        assert!(!tally.contains_key(&Pauli::I));
        // multinomial marginal: σ = √(n·⅓·⅔)
        let sigma = (n as f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
        for &count in tally.values() {
            assert!((count as f64 - n as f64 / 3.0).abs() <= 5.0 * sigma);
        }
    }

    #[test]
    fn two_qubit_support_covers_fifteen_strings() {
        let mut s = StateVector::new(2).unwrap();
        let mut rng = rng_from_seed(11);
        let mut seen = BTreeSet::new();
        for _ in 0..2000 {
            if let Some(ps) = apply_depolarizing(&mut s, &[0, 1], 0.5, &mut rng).unwrap() {
                assert!(!ps.is_identity());
                seen.insert(ps);
            }
        }
        assert_eq!(seen.len(), 15);
    }
}
