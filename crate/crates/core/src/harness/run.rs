use std::time::Instant;

use super::{default_pair_set, DistanceKind, ExperimentConfig, Mode, SearchMethod};
use crate::error::{Error, Result};
use crate::image::{
    add_gaussian_noise, classical_euclidean_distance, downsample, full_search, gaussian_smooth,
    hierarchical_search, reduce_bit_depth, BlockRef, GrayImage, MatchResult,
};
use crate::noise::NoiseModel;
use crate::qft::{build_subtractor, loaded_subtraction_circuit, run_subtraction, FanStyle, QftSsd};
use crate::rng::derive_seed;
use crate::sim::{bitstring, gate_counts, Circuit};
use crate::swap::{build_swap_test_circuit, SwapEstimator};

/// CNOT fidelities of the default QFT sweep.
pub const DEFAULT_FIDELITIES: [f64; 5] = [1.0, 0.999, 0.995, 0.99, 0.98];

/// Operands of the fixed sweep instance.
const SWEEP_A: u64 = 9;
const SWEEP_B: u64 = 8;
const SWEEP_BITS: usize = 4;

fn fmt_f64(x: f64) -> String {
    format!("{x:.6}")
}

/// A row type with a fixed CSV schema.
pub trait CsvRecord {
    const COMMAND: &'static str;
    const HEADER: &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

/// Versioned comment line, header row, then one line per record.
pub fn write_csv<R: CsvRecord>(rows: &[R]) -> Result<Vec<u8>> {
    let mut out = format!("# qbm {} schema v1\n", R::COMMAND).into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        let to_err = |e: csv::Error| Error::Format(format!("csv: {e}"));
        w.write_record(R::HEADER).map_err(to_err)?;
        for row in rows {
            w.write_record(row.fields()).map_err(to_err)?;
        }
        w.flush().map_err(|e| Error::Format(format!("csv: {e}")))?;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwapRow {
    pub pair_index: usize,
    pub ced: f64,
    pub qed_mean: f64,
    pub qed_std: f64,
    pub p0_mean: f64,
    pub shots: u64,
    pub runs: u64,
    pub fidelity_1q: f64,
    pub fidelity_2q: f64,
    pub seed: u64,
}

impl CsvRecord for SwapRow {
    const COMMAND: &'static str = "swap-exp";
    const HEADER: &'static [&'static str] = &[
        "pair_index",
        "ced",
        "qed_mean",
        "qed_std",
        "p0_mean",
        "shots",
        "runs",
        "fidelity_1q",
        "fidelity_2q",
        "seed",
    ];
    fn fields(&self) -> Vec<String> {
        vec![
            self.pair_index.to_string(),
            fmt_f64(self.ced),
            fmt_f64(self.qed_mean),
            fmt_f64(self.qed_std),
            fmt_f64(self.p0_mean),
            self.shots.to_string(),
            self.runs.to_string(),
            fmt_f64(self.fidelity_1q),
            fmt_f64(self.fidelity_2q),
            self.seed.to_string(),
        ]
    }
}

/// Swap-test distance for every pair of the default set. Noise is attached
/// when `config.mode` is [`Mode::SwapNoisy`].
pub fn run_swap_experiment(config: &ExperimentConfig) -> Result<Vec<SwapRow>> {
    config.validate()?;
    let noise = match config.mode {
        Mode::SwapNoisy => config.noise_model()?,
        _ => None,
    };
    let (f1, f2) = noise.map_or((1.0, 1.0), |m| (m.fidelity_1q(), m.fidelity_2q()));
    let pairs = default_pair_set(config.seed);
    let mut rows = Vec::with_capacity(pairs.len());
    for (i, pair) in pairs.iter().enumerate() {
        let est = SwapEstimator::new(&pair.a, &pair.b, noise.as_ref())?.estimate(
            config.shots,
            config.runs,
            derive_seed(config.seed, i as u64),
        )?;
        rows.push(SwapRow {
            pair_index: i,
            ced: pair.ced,
            qed_mean: est.mean_distance,
            qed_std: est.std_distance,
            p0_mean: est.p0_mean,
            shots: config.shots,
            runs: config.runs,
            fidelity_1q: f1,
            fidelity_2q: f2,
            seed: config.seed,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QftSweepRow {
    pub fidelity: f64,
    pub success_probability: f64,
    pub cnot_count: usize,
}

impl CsvRecord for QftSweepRow {
    const COMMAND: &'static str = "qft-sweep";
    const HEADER: &'static [&'static str] = &["fidelity", "success_probability", "cnot_count"];
    fn fields(&self) -> Vec<String> {
        vec![
            fmt_f64(self.fidelity),
            fmt_f64(self.success_probability),
            self.cnot_count.to_string(),
        ]
    }
}

/// Success frequency of `9 − 8` on the 4-bit subtractor for each CNOT
/// fidelity. Single-qubit gates are ideal unless `config.fidelity_1q` is set.
pub fn run_qft_sweep(config: &ExperimentConfig, fidelities: &[f64]) -> Result<Vec<QftSweepRow>> {
    config.validate()?;
    if fidelities.is_empty() {
        return Err(Error::argument("at least one fidelity is required"));
    }
    let (circuit, _) =
        loaded_subtraction_circuit(SWEEP_A, SWEEP_B, SWEEP_BITS, FanStyle::default())?;
    let cnot_count = gate_counts(&circuit)?.cnot_count;
    let expected = bitstring(
        ((SWEEP_A + (1 << SWEEP_BITS) - SWEEP_B) % (1 << SWEEP_BITS)) as usize,
        SWEEP_BITS,
    );
    let f1 = config.fidelity_1q.unwrap_or(1.0);
    let mut rows = Vec::with_capacity(fidelities.len());
    for (i, &f) in fidelities.iter().enumerate() {
        let model = NoiseModel::new(f1, f)?;
        let noise = (!model.is_ideal()).then_some(model);
        let hist = run_subtraction(
            SWEEP_A,
            SWEEP_B,
            SWEEP_BITS,
            noise.as_ref(),
            config.shots,
            derive_seed(config.seed, i as u64),
        )?;
        let hits = hist.get(&expected).copied().unwrap_or(0);
        rows.push(QftSweepRow {
            fidelity: f,
            success_probability: hits as f64 / config.shots as f64,
            cnot_count,
        });
    }
    Ok(rows)
}

/// Noise, downsampling, 4-bit reduction and optional smoothing.
pub fn preprocess_image(
    image: &GrayImage,
    config: &ExperimentConfig,
    seed: u64,
) -> Result<GrayImage> {
    if image.bit_depth() != 8 {
        return Err(Error::argument("preprocessing expects an 8-bit image"));
    }
    let noisy = add_gaussian_noise(image, 0.0, config.sigma, seed)?;
    let small = downsample(&noisy, config.downsample)?;
    let reduced = reduce_bit_depth(&small)?;
    Ok(if config.smooth {
        gaussian_smooth(&reduced)
    } else {
        reduced
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatchRow {
    pub offset_x: i64,
    pub offset_y: i64,
    pub distance: f64,
    pub evaluations: usize,
    /// Seconds spent searching, only recorded with `timing`.
    pub wall_time: Option<f64>,
}

impl CsvRecord for BlockMatchRow {
    const COMMAND: &'static str = "block-match";
    const HEADER: &'static [&'static str] = &[
        "offset_x",
        "offset_y",
        "distance",
        "evaluations",
        "wall_time",
    ];
    fn fields(&self) -> Vec<String> {
        vec![
            self.offset_x.to_string(),
            self.offset_y.to_string(),
            fmt_f64(self.distance),
            self.evaluations.to_string(),
            self.wall_time.map(fmt_f64).unwrap_or_default(),
        ]
    }
}

fn search<F>(
    method: SearchMethod,
    src: &GrayImage,
    block: BlockRef,
    tgt: &GrayImage,
    k: usize,
    f: &mut F,
) -> Result<MatchResult>
where
    F: FnMut(&[u32], &[u32]) -> Result<f64>,
{
    match method {
        SearchMethod::Full => full_search(src, block, tgt, k, f),
        SearchMethod::Hierarchical => hierarchical_search(src, block, tgt, k, f),
    }
}

/// Preprocess both 8-bit images, then locate the reference block in the
/// target with the configured search and distance.
///
/// The swap backend shifts every pixel by +1 so that dark blocks stay
/// encodable; distances are unchanged by the shift. The QFT backend reports
/// the square root of its sum of squared differences.
pub fn run_block_match(
    config: &ExperimentConfig,
    reference: &GrayImage,
    target: &GrayImage,
) -> Result<BlockMatchRow> {
    config.validate()?;
    let src = preprocess_image(reference, config, derive_seed(config.seed, 0))?;
    let tgt = preprocess_image(target, config, derive_seed(config.seed, 1))?;
    if (src.width(), src.height()) != (tgt.width(), tgt.height()) {
        return Err(Error::shape(format!(
            "reference is {}x{} but target is {}x{} after preprocessing",
            src.width(),
            src.height(),
            tgt.width(),
            tgt.height()
        )));
    }
    let n = config.block_n;
    let centre = |extent: usize| extent.saturating_sub(n) / 2;
    let block = BlockRef {
        x: config.ref_x.unwrap_or_else(|| centre(src.width())),
        y: config.ref_y.unwrap_or_else(|| centre(src.height())),
        n,
    };
    let noise = if config.noisy {
        config.noise_model()?
    } else {
        None
    };
    let search_seed = derive_seed(config.seed, 2);
    let mut calls = 0u64;

    let started = Instant::now();
    let found = match config.distance {
        DistanceKind::Classical => search(
            config.method,
            &src,
            block,
            &tgt,
            config.search_k,
            &mut |a, b| classical_euclidean_distance(a, b),
        )?,
        DistanceKind::Swap => {
            let mut f = |a: &[u32], b: &[u32]| {
                let shift = |v: &[u32]| v.iter().map(|&x| x + 1).collect::<Vec<_>>();
                let seed = derive_seed(search_seed, calls);
                calls += 1;
                Ok(SwapEstimator::new(&shift(a), &shift(b), noise.as_ref())?
                    .estimate(config.shots, config.runs, seed)?
                    .mean_distance)
            };
            search(config.method, &src, block, &tgt, config.search_k, &mut f)?
        }
        DistanceKind::Qft => {
            let bits = config.bits.unwrap_or(usize::from(src.bit_depth()) + 1);
            let mut ssd = QftSsd::new(bits, noise, config.shots)?;
            let mut f = |a: &[u32], b: &[u32]| {
                let seed = derive_seed(search_seed, calls);
                calls += 1;
                Ok(ssd.ssd(a, b, seed)?.sqrt())
            };
            search(config.method, &src, block, &tgt, config.search_k, &mut f)?
        }
    };
    let elapsed = started.elapsed().as_secs_f64();

    Ok(BlockMatchRow {
        offset_x: found.offset_x,
        offset_y: found.offset_y,
        distance: found.distance,
        evaluations: found.evaluations,
        wall_time: config.timing.then_some(elapsed),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateReportRow {
    pub circuit: String,
    /// Vector dimension for `swap`, register width for `qft_subtract`.
    pub size: usize,
    pub total_qubits: usize,
    pub cnot_count: usize,
    pub single_qubit_count: usize,
    pub depth: usize,
}

impl CsvRecord for GateReportRow {
    const COMMAND: &'static str = "gate-report";
    const HEADER: &'static [&'static str] = &[
        "circuit",
        "size",
        "total_qubits",
        "cnot_count",
        "single_qubit_count",
        "depth",
    ];
    fn fields(&self) -> Vec<String> {
        vec![
            self.circuit.clone(),
            self.size.to_string(),
            self.total_qubits.to_string(),
            self.cnot_count.to_string(),
            self.single_qubit_count.to_string(),
            self.depth.to_string(),
        ]
    }
}

/// Resources of a named circuit after decomposition.
///
/// `swap` builds the swap test for `[9; size]` against the same vector
/// with its third entry lowered to 8 (the last entry when `size < 3`).
/// `qft_subtract` builds the bare `size`-bit subtractor.
pub fn gate_report(circuit: &str, size: usize) -> Result<GateReportRow> {
    let c: Circuit = match circuit {
        "swap" => {
            if size == 0 {
                return Err(Error::argument("vector dimension must be at least 1"));
            }
            let a = vec![9u32; size];
            let mut b = a.clone();
            b[2.min(size - 1)] = 8;
            build_swap_test_circuit(&crate::encoding::build_pair_encoding(&a, &b)?)?
        }
        "qft_subtract" => build_subtractor(size)?.0,
        other => return Err(Error::argument(format!("unknown circuit '{other}'"))),
    };
    let r = gate_counts(&c)?;
    Ok(GateReportRow {
        circuit: circuit.to_string(),
        size,
        total_qubits: r.total_qubits,
        cnot_count: r.cnot_count,
        single_qubit_count: r.single_qubit_count,
        depth: r.depth,
    })
}
