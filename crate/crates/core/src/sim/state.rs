use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use super::circuit::Circuit;
use super::gate::{GateKind, GateOp};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Default upper bound on register size for dense simulation.
pub const MAX_QUBITS: usize = 24;

/// Measurement histogram keyed by bitstring.
///
/// Bitstrings list the measured qubits most-significant first: for
/// `qubits = [q0, q1, q2]` the key is `b(q2) b(q1) b(q0)`.
pub type Histogram = BTreeMap<String, u64>;

/// Render `value` as a `width`-character bitstring, most significant bit first.
pub fn bitstring(value: usize, width: usize) -> String {
    (0..width)
        .rev()
        .map(|i| if (value >> i) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Parse a histogram key back into its integer value.
pub fn parse_bitstring(bits: &str) -> Option<usize> {
    usize::from_str_radix(bits, 2).ok()
}

/// Dense state vector. Qubit 0 is the least significant bit of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `num_qubits` qubits.
    pub fn new(num_qubits: usize) -> Result<Self> {
        Self::with_limit(num_qubits, MAX_QUBITS)
    }

    pub fn with_limit(num_qubits: usize, max_qubits: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > max_qubits {
            return Err(Error::Capacity(format!(
                "{num_qubits} qubits requested, supported range is 1..={max_qubits}"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { num_qubits, amps })
    }

    /// Basis state `|index⟩`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        let mut s = Self::new(num_qubits)?;
        if index >= s.amps.len() {
            return Err(Error::argument(format!(
                "basis index {index} out of range for {num_qubits} qubits"
            )));
        }
        s.amps[0] = Complex64::new(0.0, 0.0);
        s.amps[index] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    /// Wrap explicit amplitudes. The length must be a power of two and the
    /// vector must be normalized to within 1e-6.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::shape(format!(
                "amplitude count {len} is not a power of two >= 2"
            )));
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(Error::Capacity(format!(
                "{num_qubits} qubits exceeds {MAX_QUBITS}"
            )));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(Error::argument(format!(
                "state norm² is {norm}, expected 1"
            )));
        }
        Ok(Self { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::shape(format!(
                "inner product of {}- and {}-qubit states",
                self.num_qubits, other.num_qubits
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// |⟨self|other⟩|, insensitive to global phase.
    pub fn overlap(&self, other: &StateVector) -> Result<f64> {
        self.inner(other).map(|z| z.norm())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            Err(Error::Index {
                index: q,
                num_qubits: self.num_qubits,
            })
        } else {
            Ok(())
        }
    }

    /// Apply one gate in place.
    pub fn apply(&mut self, op: &GateOp) -> Result<()> {
        op.check_range(self.num_qubits)?;
        self.apply_unchecked(op);
        Ok(())
    }

    pub(crate) fn apply_unchecked(&mut self, op: &GateOp) {
        let t = op.targets();
        match op.kind() {
            GateKind::X => self.pauli_x(t[0]),
            GateKind::Phase => self.phase_one(t[0], Complex64::from_polar(1.0, op.angle())),
            GateKind::Rz => {
                let half = op.angle() / 2.0;
                self.diag_one(
                    t[0],
                    Complex64::from_polar(1.0, -half),
                    Complex64::from_polar(1.0, half),
                )
            }
            GateKind::H | GateKind::Ry | GateKind::Sx => {
                let m = op.local_matrix();
                self.single([[m[0][0], m[0][1]], [m[1][0], m[1][1]]], t[0]);
            }
            GateKind::Cnot => self.cnot(t[0], t[1]),
            GateKind::Cphase => {
                let mask = (1 << t[0]) | (1 << t[1]);
                self.phase_mask(mask, Complex64::from_polar(1.0, op.angle()));
            }
            GateKind::Ccphase => {
                let mask = (1 << t[0]) | (1 << t[1]) | (1 << t[2]);
                self.phase_mask(mask, Complex64::from_polar(1.0, op.angle()));
            }
            GateKind::Cswap => self.cswap(t[0], t[1], t[2]),
        }
    }

    /// Apply `op` in place, returning `self` for chaining.
    pub fn apply_gate(mut self, op: &GateOp) -> Result<Self> {
        self.apply(op)?;
        Ok(self)
    }

    /// Run every op of `circuit` in order.
    pub fn run(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.num_qubits() != self.num_qubits {
            return Err(Error::shape(format!(
                "circuit on {} qubits applied to a {}-qubit state",
                circuit.num_qubits(),
                self.num_qubits
            )));
        }
        // Circuit ops are range-checked on insertion.
        for op in circuit.ops() {
            self.apply_unchecked(op);
        }
        Ok(())
    }

    pub fn apply_circuit(mut self, circuit: &Circuit) -> Result<Self> {
        self.run(circuit)?;
        Ok(self)
    }

    fn single(&mut self, m: [[Complex64; 2]; 2], q: usize) {
        let stride = 1usize << q;
        for base in (0..self.amps.len()).step_by(stride << 1) {
            for i in base..base + stride {
                let a0 = self.amps[i];
                let a1 = self.amps[i + stride];
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i + stride] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn diag_one(&mut self, q: usize, d0: Complex64, d1: Complex64) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            *a *= if (i >> q) & 1 == 0 { d0 } else { d1 };
        }
    }

    fn phase_one(&mut self, q: usize, ph: Complex64) {
        self.phase_mask(1 << q, ph);
    }

    fn phase_mask(&mut self, mask: usize, ph: Complex64) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *a *= ph;
            }
        }
    }

    pub(crate) fn pauli_x(&mut self, q: usize) {
        let stride = 1usize << q;
        for base in (0..self.amps.len()).step_by(stride << 1) {
            for i in base..base + stride {
                self.amps.swap(i, i + stride);
            }
        }
    }

    pub(crate) fn pauli_z(&mut self, q: usize) {
        self.phase_one(q, Complex64::new(-1.0, 0.0));
    }

    pub(crate) fn pauli_y(&mut self, q: usize) {
        // Y = [[0, -i], [i, 0]]
        let stride = 1usize << q;
        let i_unit = Complex64::new(0.0, 1.0);
        for base in (0..self.amps.len()).step_by(stride << 1) {
            for i in base..base + stride {
                let a0 = self.amps[i];
                let a1 = self.amps[i + stride];
                self.amps[i] = -i_unit * a1;
                self.amps[i + stride] = i_unit * a0;
            }
        }
    }

    fn cnot(&mut self, control: usize, target: usize) {
        let cmask = 1usize << control;
        let tmask = 1usize << target;
        for i in 0..self.amps.len() {
            if i & cmask != 0 && i & tmask == 0 {
                self.amps.swap(i, i | tmask);
            }
        }
    }

    fn cswap(&mut self, control: usize, a: usize, b: usize) {
        let cmask = 1usize << control;
        let amask = 1usize << a;
        let bmask = 1usize << b;
        for i in 0..self.amps.len() {
            if i & cmask != 0 && i & amask != 0 && i & bmask == 0 {
                self.amps.swap(i, (i & !amask) | bmask);
            }
        }
    }

    /// Marginal `(p0, p1)` of one qubit.
    pub fn qubit_probabilities(&self, qubit: usize) -> Result<(f64, f64)> {
        self.check_qubit(qubit)?;
        let mut p1 = 0.0;
        let mut total = 0.0;
        for (i, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            total += p;
            if (i >> qubit) & 1 == 1 {
                p1 += p;
            }
        }
        let p1 = (p1 / total).clamp(0.0, 1.0);
        Ok((1.0 - p1, p1))
    }

    /// Joint distribution of `qubits`; entry `v` is the probability that
    /// qubit `qubits[j]` reads bit `j` of `v` for every `j`.
    pub fn marginal_distribution(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        if qubits.is_empty() {
            return Err(Error::argument("no qubits to measure"));
        }
        for (i, &q) in qubits.iter().enumerate() {
            self.check_qubit(q)?;
            if qubits[..i].contains(&q) {
                return Err(Error::argument(format!("qubit {q} listed twice")));
            }
        }
        let mut dist = vec![0.0; 1 << qubits.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let outcome = qubits
                .iter()
                .enumerate()
                .fold(0usize, |acc, (j, &q)| acc | (((i >> q) & 1) << j));
            dist[outcome] += a.norm_sqr();
        }
        Ok(dist)
    }

    /// Draw `shots` samples of `qubits` from the exact joint distribution.
    pub fn sample_counts(&self, qubits: &[usize], shots: u64, seed: u64) -> Result<Histogram> {
        if shots == 0 {
            return Err(Error::argument("shots must be at least 1"));
        }
        let dist = self.marginal_distribution(qubits)?;
        let mut rng = rng_from_seed(seed);
        sample_distribution(&dist, qubits.len(), shots, &mut rng)
    }
}

/// Sample `shots` outcomes from a distribution over `width`-bit values.
pub fn sample_distribution<R: Rng>(
    dist: &[f64],
    width: usize,
    shots: u64,
    rng: &mut R,
) -> Result<Histogram> {
    let sampler = WeightedIndex::new(dist)
        .map_err(|e| Error::argument(format!("cannot sample distribution: {e}")))?;
    let mut tally = vec![0u64; dist.len()];
    for _ in 0..shots {
        tally[sampler.sample(rng)] += 1;
    }
    Ok(tally
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .map(|(v, c)| (bitstring(v, width), c))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn assert_amps(state: &StateVector, expect: &[Complex64], tol: f64) {
        for (a, e) in state.amplitudes().iter().zip(expect) {
            assert!((a - e).norm() < tol, "{a} vs {e}");
        }
    }

    #[test]
    fn ground_state() {
        let s = StateVector::new(1).unwrap();
        assert_eq!(s.amplitudes(), &[c(1.0), c(0.0)]);
        let s = StateVector::new(2).unwrap();
        assert_eq!(s.amplitudes(), &[c(1.0), c(0.0), c(0.0), c(0.0)]);
    }

    #[test]
    fn capacity_boundary() {
        assert!(matches!(StateVector::new(25), Err(Error::Capacity(_))));
        assert!(matches!(StateVector::new(0), Err(Error::Capacity(_))));
        assert!(matches!(
            StateVector::with_limit(5, 4),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn hadamard_on_zero() {
        let s = StateVector::new(1)
            .unwrap()
            .apply_gate(&GateOp::h(0))
            .unwrap();
        assert_amps(&s, &[c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)], 1e-15);
    }

    #[test]
    fn cnot_truth_table() {
        // |10⟩ in q1 q0 notation with control q0 set: index 0b01.
        let s = StateVector::basis(2, 0b01).unwrap();
        let s = s.apply_gate(&GateOp::cnot(0, 1)).unwrap();
        assert_amps(&s, &[c(0.0), c(0.0), c(0.0), c(1.0)], 1e-15);
        let s = StateVector::basis(2, 0b10).unwrap();
        let s = s.apply_gate(&GateOp::cnot(0, 1)).unwrap();
        assert_amps(&s, &[c(0.0), c(0.0), c(1.0), c(0.0)], 1e-15);
    }

    #[test]
    fn ry_pi_flips() {
        let s = StateVector::new(1)
            .unwrap()
            .apply_gate(&GateOp::ry(0, PI))
            .unwrap();
        assert!(s.amplitudes()[0].norm() < 1e-15);
        assert!((s.amplitudes()[1].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bad_index_is_rejected() {
        let mut s = StateVector::new(2).unwrap();
        assert!(matches!(
            s.apply(&GateOp::h(2)),
            Err(Error::Index { index: 2, .. })
        ));
        assert!(s.qubit_probabilities(3).is_err());
    }

    #[test]
    fn pauli_kernels_match_matrices() {
        let mut s = StateVector::new(2).unwrap();
        s.apply(&GateOp::h(0)).unwrap();
        s.apply(&GateOp::ry(1, 0.8)).unwrap();
        let mut y = s.clone();
        y.pauli_y(1);
        // Y = i·X·Z
        let mut xz = s.clone();
        xz.pauli_z(1);
        xz.pauli_x(1);
        for (a, b) in y.amplitudes().iter().zip(xz.amplitudes()) {
            assert!((a - Complex64::new(0.0, 1.0) * b).norm() < 1e-14);
        }
    }

    #[test]
    fn cswap_moves_amplitude() {
        // control q0 = 1, a = q1 = 1, b = q2 = 0 → a = 0, b = 1.
        let s = StateVector::basis(3, 0b011).unwrap();
        let s = s.apply_gate(&GateOp::cswap(0, 1, 2)).unwrap();
        assert!((s.amplitudes()[0b101].norm() - 1.0).abs() < 1e-15);
        // control off: unchanged
        let s = StateVector::basis(3, 0b010).unwrap();
        let s = s.apply_gate(&GateOp::cswap(0, 1, 2)).unwrap();
        assert!((s.amplitudes()[0b010].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn marginals() {
        let s = StateVector::new(1).unwrap();
        assert_eq!(s.qubit_probabilities(0).unwrap(), (1.0, 0.0));
        let s = s.apply_gate(&GateOp::h(0)).unwrap();
        let (p0, p1) = s.qubit_probabilities(0).unwrap();
        assert!((p0 - 0.5).abs() < 1e-12 && (p1 - 0.5).abs() < 1e-12);

        let bell = StateVector::new(2)
            .unwrap()
            .apply_gate(&GateOp::h(0))
            .unwrap()
            .apply_gate(&GateOp::cnot(0, 1))
            .unwrap();
        let (p0, p1) = bell.qubit_probabilities(1).unwrap();
        assert!((p0 - 0.5).abs() < 1e-12);
        assert!((p0 + p1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bitstrings_are_msb_first() {
        assert_eq!(bitstring(1, 4), "0001");
        assert_eq!(bitstring(14, 4), "1110");
        assert_eq!(parse_bitstring("1110"), Some(14));
    }

    #[test]
    fn deterministic_sampling() {
        let s = StateVector::new(1).unwrap();
        let h = s.sample_counts(&[0], 100, 3).unwrap();
        assert_eq!(h.get("0"), Some(&100));
        assert_eq!(h.len(), 1);
        assert!(s.sample_counts(&[0], 0, 3).is_err());
    }

    #[test]
    fn plus_state_sampling_within_binomial_bound() {
        let s = StateVector::new(1)
            .unwrap()
            .apply_gate(&GateOp::h(0))
            .unwrap();
        let h = s.sample_counts(&[0], 4000, 42).unwrap();
        let zeros = *h.get("0").unwrap_or(&0) as f64;
        // σ = √(4000·¼) = √1000
        assert!((zeros - 2000.0).abs() <= 5.0 * 1000f64.sqrt());
        assert_eq!(h.values().sum::<u64>(), 4000);
        assert_eq!(h, s.sample_counts(&[0], 4000, 42).unwrap());
    }

    #[test]
    fn bell_sampling_has_no_odd_parity() {
        let bell = StateVector::new(2)
            .unwrap()
            .apply_gate(&GateOp::h(0))
            .unwrap()
            .apply_gate(&GateOp::cnot(0, 1))
            .unwrap();
        let h = bell.sample_counts(&[0, 1], 1000, 9).unwrap();
        assert!(h.keys().all(|k| k == "00" || k == "11"));
        assert_eq!(h.len(), 2);
    }

    #[test]
    fn from_amplitudes_validates() {
        assert!(StateVector::from_amplitudes(vec![c(1.0), c(0.0), c(0.0)]).is_err());
        assert!(StateVector::from_amplitudes(vec![c(1.0), c(1.0)]).is_err());
        assert!(StateVector::from_amplitudes(vec![c(0.6), c(0.8)]).is_ok());
    }
}
