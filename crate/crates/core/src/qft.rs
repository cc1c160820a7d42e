//! QFT (Draper) subtraction of two basis-encoded integers and the sum of
//! squared pixel differences built from it.
//!
//! Register layout for `bits`-wide operands, least significant qubit first:
//!
//! ```text
//! a   = qubits 0 .. bits
//! b   = qubits bits .. 2·bits
//! sum = qubits 2·bits .. 3·bits      (starts at |0⟩, ends holding (a − b) mod 2^bits)
//! ```
//!
//! After the forward QFT (no bit-reversal swaps), sum qubit `j` carries the
//! phase `2π·x / 2^(j+1)`. Adding `2^i` therefore means a phase of
//! `2π·2^i / 2^(j+1)` on every sum qubit `j`, controlled by operand qubit `i`.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::noise::{NoiseModel, TrajectorySimulator};
use crate::rng::derive_seed;
use crate::sim::{parse_bitstring, Circuit, GateOp, Histogram, StateVector};

/// Qubit assignment of the three-register subtractor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdderLayout {
    pub bits: usize,
    pub a_register: Vec<usize>,
    pub b_register: Vec<usize>,
    pub sum_register: Vec<usize>,
}

impl AdderLayout {
    pub fn new(bits: usize) -> Self {
        Self {
            bits,
            a_register: (0..bits).collect(),
            b_register: (bits..2 * bits).collect(),
            sum_register: (2 * bits..3 * bits).collect(),
        }
    }

    pub fn total_qubits(&self) -> usize {
        3 * self.bits
    }
}

/// How an operand qubit of weight `2^i` drives the Fourier-space sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FanStyle {
    /// Phase-estimation style: operand qubit `i` controls the unit
    /// increment `2^i` times (controlled-U^(2^i) as repeated controlled-U).
    #[default]
    Repeated,
    /// One controlled phase per (operand qubit, sum qubit) pair, with the
    /// weight folded into the angle; trivial 2π multiples dropped.
    Merged,
}

fn check_bits(bits: usize) -> Result<()> {
    if bits == 0 {
        return Err(Error::argument("register width must be at least 1 bit"));
    }
    if 3 * bits > crate::sim::MAX_QUBITS {
        return Err(Error::Capacity(format!(
            "{bits}-bit subtractor needs {} qubits",
            3 * bits
        )));
    }
    Ok(())
}

/// Quantum Fourier transform on `bits` qubits without the final swaps.
pub fn qft_circuit(bits: usize, inverse: bool) -> Result<Circuit> {
    if bits == 0 {
        return Err(Error::argument("QFT needs at least 1 qubit"));
    }
    let mut c = Circuit::new(bits)?;
    for j in (0..bits).rev() {
        c.push(GateOp::h(j))?;
        for k in (0..j).rev() {
            c.push(GateOp::cphase(k, j, PI / f64::from(1u32 << (j - k))))?;
        }
    }
    if inverse {
        c.inverse()
    } else {
        Ok(c)
    }
}

/// Subtractor with the default (phase-estimation style) operand fans.
pub fn build_subtractor(bits: usize) -> Result<(Circuit, AdderLayout)> {
    build_subtractor_with(bits, FanStyle::default())
}

/// QFT on the sum register, +fan per `a` qubit, −fan per `b` qubit,
/// inverse QFT. Operands are not loaded.
pub fn build_subtractor_with(bits: usize, style: FanStyle) -> Result<(Circuit, AdderLayout)> {
    check_bits(bits)?;
    let layout = AdderLayout::new(bits);
    let mut c = Circuit::new(layout.total_qubits())?;
    c.append_mapped(&qft_circuit(bits, false)?, &layout.sum_register)?;
    for (sign, register) in [(1.0, &layout.a_register), (-1.0, &layout.b_register)] {
        for (i, &control) in register.iter().enumerate() {
            push_fan(&mut c, control, i, sign, &layout.sum_register, style)?;
        }
    }
    c.append_mapped(&qft_circuit(bits, true)?, &layout.sum_register)?;
    Ok((c, layout))
}

fn push_fan(
    c: &mut Circuit,
    control: usize,
    weight_log2: usize,
    sign: f64,
    sum: &[usize],
    style: FanStyle,
) -> Result<()> {
    match style {
        FanStyle::Repeated => {
            for _ in 0..1usize << weight_log2 {
                for (j, &s) in sum.iter().enumerate() {
                    let angle = sign * 2.0 * PI / f64::from(1u32 << (j + 1));
                    c.push(GateOp::cphase(control, s, angle))?;
                }
            }
        }
        FanStyle::Merged => {
            for (j, &s) in sum.iter().enumerate().skip(weight_log2) {
                let angle = sign * PI / f64::from(1u32 << (j - weight_log2));
                c.push(GateOp::cphase(control, s, angle))?;
            }
        }
    }
    Ok(())
}

fn check_operands(a: u64, b: u64, bits: usize) -> Result<()> {
    let limit = 1u64 << bits;
    if a >= limit || b >= limit {
        return Err(Error::argument(format!(
            "operands {a}, {b} do not fit in {bits} bits"
        )));
    }
    Ok(())
}

/// X gates loading `a` and `b`, followed by the subtractor.
pub fn loaded_subtraction_circuit(
    a: u64,
    b: u64,
    bits: usize,
    style: FanStyle,
) -> Result<(Circuit, AdderLayout)> {
    check_bits(bits)?;
    check_operands(a, b, bits)?;
    let (sub, layout) = build_subtractor_with(bits, style)?;
    let mut c = Circuit::new(layout.total_qubits())?;
    for (value, register) in [(a, &layout.a_register), (b, &layout.b_register)] {
        for (i, &q) in register.iter().enumerate() {
            if (value >> i) & 1 == 1 {
                c.push(GateOp::x(q))?;
            }
        }
    }
    c.append(&sub)?;
    Ok((c, layout))
}

/// Exact noiseless distribution of the sum register, indexed by value.
pub fn subtraction_distribution(a: u64, b: u64, bits: usize) -> Result<Vec<f64>> {
    let (c, layout) = loaded_subtraction_circuit(a, b, bits, FanStyle::default())?;
    let mut s = StateVector::new(c.num_qubits())?;
    s.run(&c)?;
    s.marginal_distribution(&layout.sum_register)
}

/// Load `a`, `b`, subtract, and measure the sum register `shots` times.
pub fn run_subtraction(
    a: u64,
    b: u64,
    bits: usize,
    noise: Option<&NoiseModel>,
    shots: u64,
    seed: u64,
) -> Result<Histogram> {
    if shots == 0 {
        return Err(Error::argument("shots must be at least 1"));
    }
    let (c, layout) = loaded_subtraction_circuit(a, b, bits, FanStyle::default())?;
    match noise {
        None => {
            let mut s = StateVector::new(c.num_qubits())?;
            s.run(&c)?;
            s.sample_counts(&layout.sum_register, shots, seed)
        }
        Some(model) => Ok(TrajectorySimulator::new(&c, *model, &layout.sum_register)?
            .run(shots, seed)?
            .histogram),
    }
}

/// Most frequent outcome; ties go to the smaller value.
pub fn modal_outcome(hist: &Histogram) -> Option<u64> {
    hist.iter()
        .filter_map(|(k, &c)| parse_bitstring(k).map(|v| (v as u64, c)))
        .max_by(|x, y| x.1.cmp(&y.1).then(y.0.cmp(&x.0)))
        .map(|(v, _)| v)
}

/// Interpret a `bits`-wide measurement as a two's-complement value in
/// `[−2^(bits−1), 2^(bits−1))`.
pub fn decode_signed(value: u64, bits: usize) -> i64 {
    let half = 1i64 << (bits - 1);
    let v = value as i64;
    if v >= half {
        v - (1i64 << bits)
    } else {
        v
    }
}

/// Sum of squared differences with every pixel difference computed by its
/// own subtraction circuit. Differences outside `[−2^(bits−1), 2^(bits−1))`
/// wrap, so pick `bits` one wider than the pixel depth for exact results.
pub fn ssd_distance(
    img1: &[u32],
    img2: &[u32],
    bits: usize,
    noise: Option<&NoiseModel>,
    shots: u64,
    seed: u64,
) -> Result<f64> {
    let mut calc = QftSsd::new(bits, noise.copied(), shots)?;
    calc.ssd(img1, img2, seed)
}

/// Pixel-wise QFT subtraction with a cache of noiseless outcomes.
#[derive(Debug, Clone)]
pub struct QftSsd {
    bits: usize,
    noise: Option<NoiseModel>,
    shots: u64,
    noiseless: HashMap<(u64, u64), u64>,
}

impl QftSsd {
    pub fn new(bits: usize, noise: Option<NoiseModel>, shots: u64) -> Result<Self> {
        check_bits(bits)?;
        if shots == 0 {
            return Err(Error::argument("shots must be at least 1"));
        }
        Ok(Self {
            bits,
            noise: noise.filter(|m| !m.is_ideal()),
            shots,
            noiseless: HashMap::new(),
        })
    }

    /// Modal difference `(a − b) mod 2^bits` as measured.
    ///
    /// Noiseless outcomes are deterministic, so they are simulated once per
    /// operand pair and reused.
    pub fn difference(&mut self, a: u64, b: u64, seed: u64) -> Result<u64> {
        check_operands(a, b, self.bits)?;
        match &self.noise {
            None => {
                if let Some(&v) = self.noiseless.get(&(a, b)) {
                    return Ok(v);
                }
                let hist = run_subtraction(a, b, self.bits, None, self.shots, seed)?;
                let v = modal_outcome(&hist).expect("non-empty histogram");
                self.noiseless.insert((a, b), v);
                Ok(v)
            }
            Some(model) => {
                let hist = run_subtraction(a, b, self.bits, Some(model), self.shots, seed)?;
                Ok(modal_outcome(&hist).expect("non-empty histogram"))
            }
        }
    }

    pub fn ssd(&mut self, img1: &[u32], img2: &[u32], seed: u64) -> Result<f64> {
        if img1.len() != img2.len() {
            return Err(Error::shape(format!(
                "vectors have different lengths ({} vs {})",
                img1.len(),
                img2.len()
            )));
        }
        let mut total = 0i64;
        for (i, (&x, &y)) in img1.iter().zip(img2).enumerate() {
            let v = self.difference(u64::from(x), u64::from(y), derive_seed(seed, i as u64))?;
            let d = decode_signed(v, self.bits);
            total += d * d;
        }
        Ok(total as f64)
    }
}
